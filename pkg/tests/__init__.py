"""
Tests for the Quality Control application.
"""
