"""Strict JSON parsing helpers used by every file loader.

All engine file formats reject unknown keys and report parse failures with
line/column positions, so the loaders share one small vocabulary of checks
instead of hand-rolling them per format.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, NoReturn

from .errors import FormatError

_KIND_CHECKS = {
    "object": lambda v: isinstance(v, dict),
    "list": lambda v: isinstance(v, list),
    "string": lambda v: isinstance(v, str),
    "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
    "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "boolean": lambda v: isinstance(v, bool),
}


def load_json_text(text: str, *, error_cls: type[FormatError],
                   source: str | None = None) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise error_cls(exc.msg, source=source, line=exc.lineno,
                        column=exc.colno) from exc


def load_json_file(path: str | Path, *, error_cls: type[FormatError]) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise error_cls(f"cannot read file: {exc}", source=str(path)) from exc
    return load_json_text(text, error_cls=error_cls, source=str(path))


class FieldReader:
    """Reads one JSON object with mandatory unknown-key rejection.

    Usage: require()/optional() each declared field, then finish(), which
    rejects any keys that were never declared.
    """

    def __init__(self, obj: Any, context: str, *,
                 error_cls: type[FormatError], source: str | None = None) -> None:
        if not isinstance(obj, dict):
            raise error_cls(f"{context} must be an object", source=source)
        self._obj = obj
        self._context = context
        self._error_cls = error_cls
        self._source = source
        self._seen: set[str] = set()

    def fail(self, message: str) -> NoReturn:
        raise self._error_cls(f"{self._context}: {message}", source=self._source)

    def _check(self, key: str, kind: str | None, value: Any) -> Any:
        if kind is not None and not _KIND_CHECKS[kind](value):
            self.fail(f"field {key!r} must be a {kind}")
        return value

    def require(self, key: str, kind: str | None = None) -> Any:
        self._seen.add(key)
        if key not in self._obj:
            self.fail(f"missing required field {key!r}")
        return self._check(key, kind, self._obj[key])

    def optional(self, key: str, kind: str | None = None, default: Any = None) -> Any:
        self._seen.add(key)
        if key not in self._obj or self._obj[key] is None:
            return default
        return self._check(key, kind, self._obj[key])

    def finish(self) -> None:
        unknown = sorted(set(self._obj) - self._seen)
        if unknown:
            self.fail("unknown key(s): " + ", ".join(repr(k) for k in unknown))


def expect_string_list(value: Any, context: str, *,
                       error_cls: type[FormatError],
                       source: str | None = None) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise error_cls(f"{context} must be a list of strings", source=source)
    return value
