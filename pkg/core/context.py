"""
Global context module.

Holds per-invocation values; today only the run id stamped on every log line.
Worker processes of a parallel table receive the parent's run id explicitly.
"""

import uuid


class GlobalContext:
    """
    Process-wide key/value store for the current command invocation.
    """

    def __init__(self):
        self.values = {}

    def set(self, key, value):
        """
        Store a context value.

        :param key: Context key, e.g. "run_id".
        :param value: Value to store.
        """
        self.values[key] = value

    def get(self, key, default=None):
        """
        Read a context value.

        :param key: Context key.
        :param default: Returned when the key was never set.
        :return: The stored value or default.
        """
        return self.values.get(key, default)

    def new_run(self, label: str) -> str:
        """
        Start a new run: stores a fresh run id tagged with the command label.

        :param label: Command name (e.g. "solve").
        :return: The run id.
        """
        run_id = f"{label}:{uuid.uuid4().hex[:8]}"
        self.set("run_id", run_id)
        return run_id


global_context = GlobalContext()
