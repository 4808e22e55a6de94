#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
高斯过程回归实验程序 - 主程序入口
"""

import sys

from coregp.main import main

if __name__ == "__main__":
    sys.exit(main())
