"""
File output helpers for broadcastkit
CSV files are written with '.' decimals, 17 significant digits, '\\n' line
endings and UTF-8, so a run with a fixed seed reproduces the same bytes.
"""
import os
from pathlib import Path
from typing import Optional, Tuple

import pandas as pd

CSV_FLOAT_FORMAT = "%.17g"


class PathUtils:
    """Path utilities"""

    @staticmethod
    def ensure_dir_exists(path: Path) -> Path:
        """
        Ensure directory exists, create if needed.

        Args:
            path: Directory path

        Returns:
            Path: The directory path
        """
        path.mkdir(parents=True, exist_ok=True)
        return path

    @staticmethod
    def check_writable(file_path: Path) -> Tuple[bool, Optional[str]]:
        """Can file_path be created or overwritten? Returns (ok, error_message)."""
        parent = file_path.parent if str(file_path.parent) else Path(".")
        if file_path.exists() and file_path.is_dir():
            return False, f"Output path is a directory: {file_path}"
        if parent.exists() and not parent.is_dir():
            return False, f"Parent of output path is not a directory: {parent}"
        if parent.exists() and not os.access(parent, os.W_OK):
            return False, f"Directory is not writable: {parent}"
        return True, None


def _atomic_write(file_path: Path, write) -> Tuple[bool, Optional[str]]:
    try:
        ok, error = PathUtils.check_writable(file_path)
        if not ok:
            return False, error
        PathUtils.ensure_dir_exists(file_path.parent)

        # Save atomically by writing to temp file first
        temp_path = file_path.with_suffix(file_path.suffix + ".tmp")
        try:
            write(temp_path)
            temp_path.replace(file_path)
            return True, None
        finally:
            if temp_path.exists():
                temp_path.unlink()

    except OSError as e:
        return False, f"Error saving file: {e}"


def safe_csv_save(file_path: Path, frame: pd.DataFrame) -> Tuple[bool, Optional[str]]:
    """
    Write a DataFrame as CSV, header row always included.

    Returns:
        tuple: (success: bool, error_message: Optional[str])
    """
    if not isinstance(frame, pd.DataFrame):
        return False, "Data must be a DataFrame"

    def write(target: Path):
        frame.to_csv(
            target,
            index=False,
            float_format=CSV_FLOAT_FORMAT,
            lineterminator="\n",
            encoding="utf-8",
        )

    return _atomic_write(file_path, write)


def safe_text_save(file_path: Path, text: str) -> Tuple[bool, Optional[str]]:
    def write(target: Path):
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)

    return _atomic_write(file_path, write)
