"""Canonical JSON rendering.

Every JSON byte stream the platform emits (store files, CLI --json output,
HTTP response bodies, session exports) goes through :func:`canonical_json` so
that equal payloads are byte-identical regardless of which surface produced
them.
"""

from __future__ import annotations

import json
from typing import Any


def canonical_json(obj: Any) -> str:
    """Render ``obj`` as deterministic, human-diffable JSON.

    Keys are sorted, indentation is two spaces, non-ASCII passes through
    unescaped, and the output always ends with a single newline.
    """
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def canonical_json_bytes(obj: Any) -> bytes:
    return canonical_json(obj).encode("utf-8")
