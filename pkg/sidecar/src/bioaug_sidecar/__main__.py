"""Run the service: python -m bioaug_sidecar [--host H] [--port P]."""

from __future__ import annotations

import argparse
import logging

import uvicorn

from bioaug_sidecar.app import create_app
from bioaug_sidecar.config import SidecarConfig


def main() -> None:
    parser = argparse.ArgumentParser(
        description="Serve the scoring, infill, and chat backends over HTTP")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=None,
                        help="overrides BIOAUG_SIDECAR_PORT and the default")
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO,
                        format="%(asctime)s %(name)s %(message)s")
    config = SidecarConfig.from_env()
    if args.port is not None:
        config.port = args.port
        config.validate()
    uvicorn.run(create_app(config), host=args.host, port=config.port)


if __name__ == "__main__":
    main()
