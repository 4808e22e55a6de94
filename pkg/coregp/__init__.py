"""
核心集变分回火高斯过程回归工具包
"""

__version__ = "0.1.0"
