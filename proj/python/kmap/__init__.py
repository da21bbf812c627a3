"""Python bindings for the knowledge-map engine.

JSON-shaped values (configs, snapshots, cards, API bodies) are plain dicts.
"""

from ._kmap import (
    Graph,
    IntegrityError,
    InvalidArgument,
    IoError,
    KmapError,
    KnowledgeMap,
    ParseError,
    Service,
    UnknownIdError,
    ingest,
    simulate,
)

__all__ = [
    "Graph",
    "IntegrityError",
    "InvalidArgument",
    "IoError",
    "KmapError",
    "KnowledgeMap",
    "ParseError",
    "Service",
    "UnknownIdError",
    "ingest",
    "simulate",
]
