#!/usr/bin/env python3
"""
photon-dimer - few-photon scattering off a waveguide-coupled cavity dimer
Main entry point for the application
"""
import logging
import sys

from src.cli.commands import build_parser
from src.core.errors import PhotonDimerError

logger = logging.getLogger("photon_dimer")


def main(argv=None):
    """Main entry point for the application"""
    parser = build_parser()
    args = parser.parse_args(argv)

    # CSV goes to stdout, so diagnostics stay on stderr
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return args.handler(args)
    except PhotonDimerError as e:
        logger.debug("command failed", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
