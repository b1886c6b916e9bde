"""Versioned system prompts shipped as data files."""

from pathlib import Path

_PROMPT_DIR = Path(__file__).parent


def load_prompt(name: str) -> str:
    """Read a prompt file by versioned name, e.g. ``classify_v1``."""
    return (_PROMPT_DIR / f"{name}.txt").read_text(encoding="utf-8")
