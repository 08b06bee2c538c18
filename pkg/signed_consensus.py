"""
Command-line entry point for the signed consensus analysis toolkit.

Usage:
    python signed_consensus.py balance samples/Ga.json
    python signed_consensus.py controllability samples/Ga.json --leaders 4
"""
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from cli.commands import main

if __name__ == '__main__':
    main()
