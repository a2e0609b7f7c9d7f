"""Entry point for python -m informa."""

from .cli import main

if __name__ == "__main__":
    main()
