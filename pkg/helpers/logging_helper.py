import sys

from core.settings import settings
from core.context import global_context

# Define ANSI escape codes for colors and reset
RED = "\033[91m"
GREEN = "\033[92m"
BLUE = "\033[94m"
YELLOW = "\033[93m"
MAGENTA = "\033[95m"
RESET = "\033[0m"


class LoggerHelper:
    """
    Console logger with color coding. Writes to stderr so that stdout stays
    free for command data (summaries, CSV, JSON).
    """

    def __init__(self):
        self.is_debug = settings.debug_mode
        self.use_colors = settings.use_colors

    def _emit(self, level: str, color: str, message: str) -> None:
        run_id = global_context.get("run_id", "")
        if self.use_colors:
            line = f"{color}{level} {run_id} {RESET}{message}"
        else:
            line = f"{level} {run_id} {message}"
        print(line, file=sys.stderr)

    def info(self, message: str) -> None:
        """
        Logs an informational message.
            message (str): The message to log.
        """
        self._emit("INFO", BLUE, message)

    def success(self, message: str) -> None:
        """
        Logs a success message.
            message (str): The success message to log.
        """
        self._emit("SUCCESS", GREEN, message)

    def warning(self, message: str) -> None:
        """
        Logs a warning message.
            message (str): The warning message to log.
        """
        self._emit("WARNING", YELLOW, message)

    def error(self, message: str) -> None:
        """
        Logs an error message.
            message (str): The error message to log.
        """
        self._emit("ERROR", RED, message)

    def debug(self, message: str) -> None:
        """
        Logs a debug message if debug mode is enabled. Hot loops should test
        ``logger.is_debug`` before formatting the message.
            message (str): The message to log.
        """
        if self.is_debug:
            self._emit("DEBUG", MAGENTA, message)


logger = LoggerHelper()
