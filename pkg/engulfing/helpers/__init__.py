"""Helper modules for the engulfing toolkit"""
