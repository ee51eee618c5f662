"""
Core infrastructure: configuration, logging, errors and memoisation
"""
