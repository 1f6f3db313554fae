"""Time-distance maps of road networks"""
__version__ = "1.0.0"
