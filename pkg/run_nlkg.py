"""
Runner for the radial NLKG simulator.

Usage:
    python run_nlkg.py run --config src/nlkg/synthetic/config.yaml --out out
    python run_nlkg.py sweep-n --config src/nlkg/synthetic/config.yaml --jobs 4
    python run_nlkg.py exponents --p 4 --s 11/12
"""
import sys

from src.nlkg.cli import main


if __name__ == '__main__':
    sys.exit(main())
