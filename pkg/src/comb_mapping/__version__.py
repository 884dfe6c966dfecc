#!/usr/bin/env python3
"""
Version information for comb-mapping.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

__version__ = "0.1.0"
