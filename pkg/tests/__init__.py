"""
Test suite for the SPSS Data Analysis Application.
""" 