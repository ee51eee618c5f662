"""
Team automata toolkit: construction, communication checks, realisation,
composition and featured families.
"""

__version__ = "1.0.0"
