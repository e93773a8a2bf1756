"""
YAML processing utilities
"""
from typing import Any, Dict

import yaml

from app.core.logging import logger
from app.utils.file_utils import atomic_write_text


def load_yaml(file_path: str) -> Dict[str, Any]:
    """
    Load YAML file

    Args:
        file_path: Path to YAML file

    Returns:
        Parsed document
    """
    try:
        with open(file_path, "r") as f:
            return yaml.safe_load(f)

    except Exception as e:
        logger.error(f"Error loading YAML file {file_path}: {str(e)}")
        raise


def dict_to_yaml(data: Dict[str, Any]) -> str:
    """
    Convert dictionary to YAML string

    Key order is preserved so that identical data always gives identical text.
    """
    return yaml.safe_dump(data, default_flow_style=False, sort_keys=False)


def save_yaml(data: Dict[str, Any], file_path: str) -> None:
    """
    Save data as YAML file, atomically

    Args:
        data: Data to save
        file_path: Output file path
    """
    try:
        atomic_write_text(file_path, dict_to_yaml(data))
        logger.debug(f"Saved YAML file to {file_path}")

    except Exception as e:
        logger.error(f"Error saving YAML file {file_path}: {str(e)}")
        raise
