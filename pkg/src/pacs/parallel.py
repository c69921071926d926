"""Worker-count policy shared by the threaded sweeps."""
import os


def worker_count() -> int:
    """Threads to use: ``PACS_THREADS`` if set, else the CPU count."""
    env = os.environ.get("PACS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"PACS_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1
