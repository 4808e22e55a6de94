"""
报告生成模块 - 高斯过程回归实验程序
"""
