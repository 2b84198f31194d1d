"""
Logging setup
Library modules log through rich on stderr so stdout stays free for CLI data lines
"""
import logging

from rich.console import Console
from rich.logging import RichHandler

from pipeline import config

_ROOT = "devocr"
_configured = False


def get_logger(name: str) -> logging.Logger:
    """Return a child of the package logger, installing the rich handler once"""
    global _configured
    if not _configured:
        handler = RichHandler(console=Console(stderr=True), show_path=False, show_time=False)
        root = logging.getLogger(_ROOT)
        root.addHandler(handler)
        root.setLevel(config.LOG_LEVEL.upper())
        root.propagate = False
        _configured = True
    return logging.getLogger(f"{_ROOT}.{name}")
