"""
This module provides an interface for loading and updating device files.
"""
