#!/usr/bin/env python3
"""
tdm-embed entry point
Run with: python main.py <command> ...
"""
import sys

from tdm_embed.main import main

if __name__ == "__main__":
    sys.exit(main())
