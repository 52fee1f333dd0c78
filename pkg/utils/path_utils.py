"""
Path and input utilities for SymMatch.
Handles path normalization and reading input files.
"""
import hashlib
import sys
from pathlib import Path

from core.errors import InputError


def normalize_path(path: str) -> str:
    """
    Normalize a path string:
    - Remove surrounding quotes
    - Strip whitespace
    """
    if not path:
        return path

    path = path.strip()

    # Remove surrounding quotes (from drag-and-drop or copy-paste)
    if (path.startswith('"') and path.endswith('"')) or \
       (path.startswith("'") and path.endswith("'")):
        path = path[1:-1]

    return path


def read_input(path: str) -> str:
    """Read a text input file; '-' reads stdin."""
    path = normalize_path(path)
    if path == "-":
        return sys.stdin.read()

    file = Path(path)
    if not file.is_file():
        raise InputError(f"Input file not found: {path}")
    try:
        return file.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"Cannot read {path}: {e}")


def write_output(path: str, text: str):
    """Write text to a file, creating parent folders; '-' writes stdout."""
    path = normalize_path(path)
    if path == "-":
        sys.stdout.write(text)
        return
    file = Path(path)
    file.parent.mkdir(parents=True, exist_ok=True)
    file.write_text(text, encoding="utf-8")


def digest_text(text: str) -> str:
    """sha256 of the input text, used as the report's input digest."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
