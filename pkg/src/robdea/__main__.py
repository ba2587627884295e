"""Allow ``python -m robdea``."""

from .cli import main

main()
