"""
Custom colored logging system for SymMatch.
Provides rich, informative console output with colors and symbols.
Everything is written to stderr; stdout is reserved for reports.
"""
import sys
import time
import threading
from typing import Optional
import colorama
from termcolor import colored

from core.config import LOG_LEVELS, get_log_level

# Ensure colorama works on Windows
colorama.init()


class ColorLogger:
    """Colored logger with status symbols, verbosity levels and a spinner."""

    # Status symbols
    SUCCESS = "✓"
    ERROR = "✗"
    WARNING = "⚠"
    INFO = "●"
    DEBUG = "·"
    ARROW = "→"

    def __init__(self, name: str = "SymMatch", level: Optional[int] = None):
        self.name = name
        self.level = get_log_level() if level is None else level
        self._spinner_stop = threading.Event()
        self._spinner_thread: Optional[threading.Thread] = None

    def configure(self, level: Optional[int] = None):
        """Re-read SYMMATCH_LOG (after .env is loaded) or force a level."""
        self.level = get_log_level() if level is None else level

    def _enabled(self, level_name: str) -> bool:
        return self.level >= LOG_LEVELS[level_name]

    def _emit(self, text: str, **kwargs):
        print(text, file=sys.stderr, **kwargs)

    def _format_prefix(self, symbol: str, color: str) -> str:
        """Format colored prefix with timestamp."""
        timestamp = time.strftime("%H:%M:%S")
        return f"{colored(timestamp, 'white', attrs=['dark'])} {colored(symbol, color)} "

    def debug(self, message: str, **kwargs):
        """Log debug message, shown only with SYMMATCH_LOG=debug."""
        if self._enabled("debug"):
            prefix = self._format_prefix(self.DEBUG, "white")
            self._emit(f"{prefix}{colored(message, 'white', attrs=['dark'])}", **kwargs)

    def info(self, message: str, **kwargs):
        """Log info message in cyan."""
        if self._enabled("info"):
            prefix = self._format_prefix(self.INFO, "cyan")
            self._emit(f"{prefix}{message}", **kwargs)

    def success(self, message: str, **kwargs):
        """Log success message in green."""
        if self._enabled("info"):
            prefix = self._format_prefix(self.SUCCESS, "green")
            self._emit(f"{prefix}{colored(message, 'green')}", **kwargs)

    def error(self, message: str, details: Optional[str] = None, **kwargs):
        """Log error message in red with optional details. Errors ignore quiet mode."""
        prefix = self._format_prefix(self.ERROR, "red")
        self._emit(f"{prefix}{colored(message, 'red')}", **kwargs)
        if details:
            for line in details.strip().split('\n'):
                self._emit(f"         {colored(line, 'red', attrs=['dark'])}")

    def warning(self, message: str, **kwargs):
        """Log warning message in yellow."""
        if self._enabled("info"):
            prefix = self._format_prefix(self.WARNING, "yellow")
            self._emit(f"{prefix}{colored(message, 'yellow')}", **kwargs)

    def step(self, step_num: int, total: int, message: str, **kwargs):
        """Log numbered step."""
        if self._enabled("info"):
            step_str = colored(f"[{step_num}/{total}]", "magenta", attrs=["bold"])
            self._emit(f"         {step_str} {message}", **kwargs)

    def start_spinner(self, message: str = "Computing"):
        """Start animated spinner in background thread (interactive terminals only)."""
        if not (self._enabled("info") and sys.stderr.isatty()):
            return
        self._spinner_stop.clear()

        def spin():
            chars = "◐◓◑◒"
            idx = 0
            while not self._spinner_stop.is_set():
                char = colored(chars[idx % len(chars)], "cyan")
                print(f"\r         {char} {message}...", end="", flush=True, file=sys.stderr)
                idx += 1
                time.sleep(0.1)

        self._spinner_thread = threading.Thread(target=spin, daemon=True)
        self._spinner_thread.start()

    def stop_spinner(self, final_message: str = "", success: bool = True):
        """Stop spinner and optionally print final message."""
        if self._spinner_thread:
            self._spinner_stop.set()
            self._spinner_thread.join(timeout=0.5)
            self._spinner_thread = None
            print("\r" + " " * 60 + "\r", end="", file=sys.stderr)
        if final_message:
            if success:
                self.success(final_message)
            else:
                self.error(final_message)

    def section(self, title: str):
        """Print section header."""
        if self._enabled("info"):
            self._emit("")
            self._emit(colored(f"  ═══ {title} ═══", "white", attrs=["bold"]))
            self._emit("")

    def detail(self, label: str, value: str):
        """Print labeled detail line."""
        if self._enabled("info"):
            self._emit(f"         {colored(label + ':', attrs=['dark'])} {value}")


# Global logger instance
log = ColorLogger()
