"""
Market data models
"""
from enum import Enum
from typing import Dict, List

from pydantic import BaseModel, Field


class CarryQuote(BaseModel):
    """Spot and forward rate of one currency pair"""
    spot: float = Field(..., description="Spot rate r_s")
    forward: float = Field(..., description="Forward rate r_f")


class SynthKind(str, Enum):
    """Synthetic price generators"""
    MOMENTUM = "momentum"
    ALTERNATING = "alternating"
    RANDOM_WALK = "random-walk"


class FillReport(BaseModel):
    """Forward-fill accounting of a timestamp alignment"""
    rows: int = Field(..., description="Aligned rows after trimming to the common start")
    trimmed_rows: int = Field(0, description="Leading rows dropped before every symbol had data")
    filled: Dict[str, int] = Field(default_factory=dict, description="Forward-filled rows per symbol")
    fill_fraction: Dict[str, float] = Field(default_factory=dict, description="Filled rows / rows per symbol")
    max_fill_fraction: float = Field(..., description="Abort threshold")

    @property
    def total_filled(self) -> int:
        return sum(self.filled.values())


DEFAULT_CURRENCIES: List[str] = ["EUR", "GBP", "JPY", "CHF", "AUD", "CAD", "NZD", "SEK", "NOK"]
DEFAULT_SYMBOLS: List[str] = [
    "EURUSD", "GBPUSD", "USDJPY", "USDCHF", "AUDUSD", "USDCAD", "NZDUSD", "USDSEK", "USDNOK",
]
