"""
Test package for the zeta counting toolkit
"""
