#!/usr/bin/env python3
"""
Engulfing toolkit entry point.

    python main.py --builtin quartic check --mode equiv
"""
from engulfing.cli import main

if __name__ == '__main__':
    main()
