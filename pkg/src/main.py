"""
Main application entry point
"""
import sys

from teamata.cli import main

if __name__ == "__main__":
    sys.exit(main())
