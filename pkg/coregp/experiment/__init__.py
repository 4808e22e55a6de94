"""
实验模块 - 实验网格运行与结果校验
"""
