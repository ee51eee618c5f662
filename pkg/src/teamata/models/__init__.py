"""
Data models: transition systems, component automata, systems,
synchronisation types and feature expressions
"""
