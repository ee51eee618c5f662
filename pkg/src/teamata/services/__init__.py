"""
Services: team generation, communication checks, realisation, composition,
featured families and dynamic logic
"""
