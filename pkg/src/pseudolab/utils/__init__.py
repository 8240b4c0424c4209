"""Utility modules for pseudolab."""

from pseudolab.utils.file import atomic_output, atomic_write_json, atomic_write_string, flush_to_disk

__all__ = [
    "atomic_output",
    "atomic_write_json",
    "atomic_write_string",
    "flush_to_disk",
]
