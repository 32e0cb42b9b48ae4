"""Run the service: python -m nli_service [--host H] [--port P] [--model M]."""

from __future__ import annotations

import argparse

import uvicorn

from .app import create_app
from .config import ServiceConfig


def main(argv=None) -> int:
    base = ServiceConfig.from_env()
    parser = argparse.ArgumentParser(prog="nli-service", description=__doc__)
    parser.add_argument("--host", default=base.host)
    parser.add_argument("--port", type=int, default=base.port)
    parser.add_argument("--model", default=base.model_id)
    parser.add_argument("--max-batch", type=int, default=base.max_batch_size)
    parser.add_argument("--device", default=base.device)
    args = parser.parse_args(argv)
    config = ServiceConfig(
        model_id=args.model,
        host=args.host,
        port=args.port,
        max_batch_size=args.max_batch,
        device=args.device,
    )
    uvicorn.run(create_app(config), host=config.host, port=config.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
