import time
from datetime import timedelta


class Stopwatch:
    """Wall-clock timer for solves and table cells."""

    def __init__(self):
        self.start_time = time.perf_counter()

    def elapsed_ms(self) -> float:
        """Returns the elapsed time in milliseconds."""
        return (time.perf_counter() - self.start_time) * 1000.0

    def elapsed_human(self) -> str:
        """Returns the elapsed time as a human-readable string."""
        return str(timedelta(milliseconds=self.elapsed_ms()))
