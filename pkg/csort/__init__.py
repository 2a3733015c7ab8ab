"""
Optimal assignment of workers to jobs under concave mismatch costs.
"""
VERSION = "0.1.0"
