#!/usr/bin/env python3
"""
Cumulative Entropy Toolkit - Main Entry Point

Runs the full reproduction: worked examples, series constants, Table 1,
the standard normal comparison, the DFR equality case and the adaptive
series brackets. Individual computations are available through cli.py.
"""

import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from config.settings import Config
from orchestrator import ReproductionOrchestrator
from utils.logging_config import get_logger, setup_logging

logger = get_logger("main")


def print_banner():
    """Print application banner."""
    banner = Config.BANNER_CONFIG
    width = 70
    lines = [
        "",
        "╔" + "═" * width + "╗",
        "║" + f"  {banner['art_text']}  {banner['title']}".ljust(width) + "║",
        "║" + f"  Version {banner['version']}".ljust(width) + "║",
        "╚" + "═" * width + "╝",
        "",
    ]
    logger.info("\n".join(lines))
    logger.info(banner["subtitle"].expandtabs(4))


def print_usage():
    """Print usage information."""
    usage = """
USAGE:
    python main.py                    # Run the full reproduction
    python main.py --help             # Show this help message

    # Individual computations:
    python cli.py entropy "exp(lambda=1)"
    python cli.py series "uniform(a=1)" ce --width 0.01
    python cli.py bounds table1:row4
    python cli.py table1 --xlsx output/exports/table1.xlsx
    python cli.py harter --m 99
    python cli.py oracle "uniform(a=1)" largest 2
    python cli.py ingest samples.txt

DISTRIBUTIONS:
    exp(lambda=..)  uniform(a=..)  power(k=..)  normal
    table1:row1 ... table1:row6

OUTPUT DIRECTORIES:
    output/data/                      # Ledgers and sample dumps
    output/exports/                   # Excel exports of Table 1
    logs/                             # Timestamped log files (--log-file)

REQUIREMENTS:
    • Python 3.8+
    • numpy, scipy, click, openpyxl (see requirements.txt)
    """
    logger.info(usage)


def check_prerequisites():
    """Check if prerequisites are met."""
    import importlib

    issues = []
    warnings = []

    for module in ("numpy", "scipy", "click"):
        try:
            importlib.import_module(module)
        except ImportError:
            issues.append(f"Required package not installed: {module}")

    # Excel export is optional
    try:
        importlib.import_module("openpyxl")
    except ImportError:
        warnings.append("openpyxl not found - Excel export of Table 1 will be skipped")
        warnings.append("  Install with: pip install openpyxl")

    # Display warnings
    if warnings:
        logger.warning("\n⚠ WARNINGS:\n")
        for warning in warnings:
            logger.warning(f"  ! {warning}")
        logger.info("")

    # Display blocking issues
    if issues:
        logger.error("\n⚠ PREREQUISITES NOT MET:\n")
        for issue in issues:
            logger.error(f"  ✗ {issue}")
        logger.info("\nPlease resolve these issues before running the reproduction.\n")
        return False

    return True


def main():
    """Main entry point."""
    setup_logging(log_prefix="reproduction", banner_config=Config.BANNER_CONFIG)

    # Handle help argument
    if len(sys.argv) > 1 and sys.argv[1] in ['--help', '-h', 'help']:
        print_usage()
        return 0

    print_banner()

    logger.info("Checking prerequisites...")
    if not check_prerequisites():
        return 1

    logger.info("✓ All prerequisites met\n")

    try:
        orchestrator = ReproductionOrchestrator()
        return 0 if orchestrator.run_full_pipeline() else 1

    except KeyboardInterrupt:
        logger.warning("\n\n⚠ Reproduction interrupted by user")
        return 130

    except Exception as e:
        logger.error(f"\n✗ FATAL ERROR: {e}")
        logger.exception("Fatal reproduction error")
        return 1


if __name__ == "__main__":
    sys.exit(main())
