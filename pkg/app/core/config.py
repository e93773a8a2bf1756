"""
Application configuration
"""
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide settings, read from the environment (prefix ``MGTN_``) and ``.env``"""
    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="MGTN_",
        case_sensitive=True,
        extra="ignore",
    )

    PROJECT_NAME: str = "MGTN FOREX Agent"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE_PATH: Optional[str] = None

    # Numerics
    # Upper bound on J*I for an order-4 multi-linear filter (J, I, J, I)
    MAX_FILTER_DIM: int = 4096

    # Runs
    DEFAULT_OUTPUT_DIR: str = "runs"
    CHECKPOINT_FORMAT_VERSION: int = 1


settings = Settings()
