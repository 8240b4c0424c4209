"""Atomic output for result tables and manifests.

A reader (or a second run pointed at the same directory) either sees the
previous file or the complete new one, never a truncated CSV.
"""

import contextlib
import json
import os
import stat
import sys
import tempfile
from collections.abc import Iterator
from pathlib import Path
from typing import IO, Any

RESULT_FILE_MODE = stat.S_IRUSR | stat.S_IWUSR | stat.S_IRGRP | stat.S_IROTH


def flush_to_disk(handle: IO[str]) -> None:
    """Flush ``handle`` and push its data to the device.

    macOS accepts fdatasync but does not flush the drive cache with it, so fsync is used there.
    """
    handle.flush()
    sync = getattr(os, "fdatasync", None)
    if sync is None or sys.platform == "darwin":
        sync = os.fsync
    sync(handle.fileno())


@contextlib.contextmanager
def atomic_output(path: str | Path) -> Iterator[IO[str]]:
    """Open a temporary sibling of ``path`` for writing and rename it into place on success.

    Text is written with ``newline=""`` so LF stays LF on every platform. If the
    body raises, the temporary file is removed and ``path`` is left untouched.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".part", dir=target.parent)
    staged = Path(name)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            yield handle
            flush_to_disk(handle)
        staged.chmod(RESULT_FILE_MODE)
        staged.replace(target)
    except BaseException:
        with contextlib.suppress(OSError):
            staged.unlink()
        raise


def atomic_write_string(path: str | Path, content: str) -> Path:
    """Replace ``path`` with ``content`` in one step."""
    with atomic_output(path) as handle:
        handle.write(content)
    return Path(path)


def atomic_write_json(path: str | Path, data: dict[str, Any]) -> Path:
    """Write ``data`` as indented JSON with sorted keys and a trailing newline.

    Sorted keys make manifests of identical runs byte-identical.
    """
    return atomic_write_string(path, json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n")
