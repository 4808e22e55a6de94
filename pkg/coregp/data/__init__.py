"""
数据模块 - 合成数据、CSV读取与数据划分
"""
