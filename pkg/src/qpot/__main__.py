"""Module entry point: python -m qpot ..."""

from .cli import run

if __name__ == "__main__":
    run()
