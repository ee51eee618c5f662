"""
Utilities: DSL, printing, DOT export, reports and helpers
"""
