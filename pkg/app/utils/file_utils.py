"""
File handling utilities
"""
import os
import tempfile
from pathlib import Path
from typing import Union

import pandas as pd

from app.core.logging import logger

PathLike = Union[str, Path]


def ensure_directory(directory: PathLike) -> Path:
    """
    Ensure a directory exists, creating it if necessary

    Args:
        directory: The directory path to ensure

    Returns:
        The directory as a Path
    """
    try:
        path = Path(directory)
        path.mkdir(parents=True, exist_ok=True)
        return path

    except Exception as e:
        logger.error(f"Error creating directory {directory}: {str(e)}")
        raise


def atomic_write_text(file_path: PathLike, text: str) -> None:
    """
    Write text through a temporary file in the destination directory, then
    rename it over the target

    Args:
        file_path: Destination file
        text: Content
    """
    path = Path(file_path)
    ensure_directory(path.parent)
    fd, temp_path = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(temp_path, path)
    except Exception as e:
        logger.error(f"Error writing {path}: {str(e)}")
        if os.path.exists(temp_path):
            os.unlink(temp_path)
        raise


def write_csv(df: pd.DataFrame, file_path: PathLike, index: bool = False) -> None:
    """
    Write a DataFrame as CSV atomically

    Floats are written with full round-trip precision.
    """
    atomic_write_text(file_path, df.to_csv(index=index, lineterminator="\n"))
    logger.debug(f"Saved CSV file to {file_path}")
