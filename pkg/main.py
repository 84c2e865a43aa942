"""
Entropy Calculus - Main Application Entry Point

This module serves as the entry point for the entropy calculus toolkit.
It configures logging and hands the command line to the CLI dispatcher.
"""
import logging
import sys

from src.cli import run
from src.config import LOG_LEVEL, LOG_FORMAT

# Configure logging (stderr, so stdout carries only results)
logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT, stream=sys.stderr)
logger = logging.getLogger(__name__)


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
