"""Service modules: oracle, expression language, gaps, sections, checks and experiments"""
