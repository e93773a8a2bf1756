"""
Multi-graph tensor-network deep Q agent for FOREX trading
"""
__version__ = "0.1.0"
