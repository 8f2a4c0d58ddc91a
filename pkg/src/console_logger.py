import logging
import sys
from datetime import datetime

try:
    import colorama
    colorama.init()
    colorama_available = True
except ImportError:
    # Plain text when colorama is missing
    colorama_available = False

COLORS = {
    "DEBUG": "\033[36m",   # Cyan
    "INFO": "\033[94m",    # Blue
    "WARNING": "\033[93m", # Yellow
    "ERROR": "\033[91m",   # Red
    "PASS": "\033[92m",    # Green
    "FAIL": "\033[91m",    # Red
    "ENDC": "\033[0m"
}


def _paint(text: str, key: str, enabled: bool) -> str:
    if not enabled:
        return text
    return f"{COLORS.get(key, COLORS['INFO'])}{text}{COLORS['ENDC']}"


class ColoredFormatter(logging.Formatter):
    """Logging formatter that adds ANSI colors to the level name."""

    def __init__(self, fmt: str = '%(message)s', use_color: bool = None):
        super().__init__(fmt)
        self.use_color = colorama_available if use_color is None else use_color

    def format(self, record: logging.LogRecord) -> str:
        levelname = record.levelname
        timestamp = datetime.fromtimestamp(record.created).strftime('%Y-%m-%d %H:%M:%S')
        msg = super().format(record)
        return _paint(f"[{timestamp}][{levelname}] {msg}", levelname, self.use_color)


def format_check(name: str, passed: bool, detail: str = '', use_color: bool = None) -> str:
    """One verify line: PASS/FAIL tag, check name, optional detail."""
    use_color = colorama_available if use_color is None else use_color
    tag = 'PASS' if passed else 'FAIL'
    line = f"{_paint(f'[{tag}]', tag, use_color)} {name}"
    return f"{line}: {detail}" if detail else line


def setup_colored_logger(logger_name: str | None = None):
    """Attach a colored stderr handler to the root logger or a named logger.

    If a console handler already exists, its formatter is replaced with the colored formatter.
    """
    root = logging.getLogger(logger_name) if logger_name else logging.getLogger()
    colored_fmt = ColoredFormatter('%(name)s - %(message)s')

    stream_handler = None
    for h in list(root.handlers):
        if isinstance(h, logging.StreamHandler) and not isinstance(h, logging.FileHandler):
            stream_handler = h
            break

    if stream_handler:
        stream_handler.setFormatter(colored_fmt)
    else:
        handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(logging.INFO)
        handler.setFormatter(colored_fmt)
        root.addHandler(handler)

    if root.level > logging.INFO or root.level == logging.NOTSET:
        root.setLevel(logging.INFO)


__all__ = ["setup_colored_logger", "ColoredFormatter", "format_check", "colorama_available"]
