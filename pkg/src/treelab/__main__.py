"""Entry point for python -m treelab."""

from .cli import main

main()
