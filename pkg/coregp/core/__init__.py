"""
核心计算模块 - 线性代数、自动微分、核函数与高斯过程模型
"""
