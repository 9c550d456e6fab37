"""Prompt and response templates with strict slot filling.

Templates are plain-text files with ``{{slot}}`` placeholders, shipped as
package data. Rendering refuses to leave a placeholder unfilled so a
malformed slot dict can never produce a silently blank response.
"""

from __future__ import annotations

import hashlib
import re
from functools import lru_cache
from importlib import resources
from typing import Mapping

_SLOT_RE = re.compile(r"\{\{(\w+)\}\}")


class TemplateError(ValueError):
    pass


def _data_dir(kind: str):
    return resources.files("litnav").joinpath("data", kind)


@lru_cache(maxsize=None)
def load_template(kind: str, name: str) -> str:
    """Load one template file (kind is "prompts" or "templates")."""
    path = _data_dir(kind).joinpath(f"{name}.txt")
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise TemplateError(f"missing template {kind}/{name}") from None


def render_template(text: str, slots: Mapping[str, object]) -> str:
    """Fill every placeholder; leftover placeholders are an error."""
    out = text
    for key, value in slots.items():
        out = out.replace("{{" + key + "}}", str(value))
    leftover = _SLOT_RE.search(out)
    if leftover:
        raise TemplateError(f"unfilled slot {leftover.group(1)!r}")
    return out.rstrip("\n")


def render(kind: str, name: str, slots: Mapping[str, object]) -> str:
    return render_template(load_template(kind, name), slots)


@lru_cache(maxsize=1)
def templates_checksum() -> str:
    """SHA-256 over all shipped template files, recorded in provenance."""
    digest = hashlib.sha256()
    for kind in ("prompts", "templates"):
        folder = _data_dir(kind)
        for entry in sorted(folder.iterdir(), key=lambda e: e.name):
            if entry.name.endswith(".txt"):
                digest.update(entry.name.encode("utf-8"))
                digest.update(entry.read_text(encoding="utf-8").encode("utf-8"))
    return digest.hexdigest()
