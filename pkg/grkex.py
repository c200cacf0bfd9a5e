#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
grkex - Entry Point

This script runs the grkex command-line tool from a source checkout.
"""

import sys
import os

# Add the parent directory to the path to allow imports from the local package
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

# Import the main function
from grkex import main

if __name__ == "__main__":
    main()
