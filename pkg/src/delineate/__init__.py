"""Delineate.

Core-and-extension delineation of gender/sex related research from
bibliographic record exports: journal core selection, topic mining,
keyword compilation, title retrieval, segmentation and descriptive analytics.
"""

__version__ = "0.1.0"
