"""Entry point: run the embedding service under uvicorn."""

import argparse

import uvicorn

from .app import create_app
from .encoders import DEFAULT_MODEL, HashEncoder, SentenceTransformerEncoder


def main():
    parser = argparse.ArgumentParser(description="HTTP sentence-embedding service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--model", default=DEFAULT_MODEL,
                        help="sentence-transformers checkpoint to serve")
    parser.add_argument("--hash-encoder", action="store_true",
                        help="serve the deterministic hash encoder (no model download)")
    args = parser.parse_args()

    if args.hash_encoder:
        app = create_app(encoder=HashEncoder())
    else:
        app = create_app(encoder_factory=lambda: SentenceTransformerEncoder(args.model))
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
