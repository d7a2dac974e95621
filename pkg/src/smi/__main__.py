"""Allow `python -m smi` to behave exactly like the installed console script."""

from .cli import entrypoint

entrypoint()
