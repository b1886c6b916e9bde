"""Three-stage repair of malformed structured model output.

Stage 1 is a strict JSON parse and never modifies its input. Stage 2
appends missing closing delimiters found by a string- and escape-aware
character stack; it only ever appends, so a successful repair is the
original text plus a closer suffix. Stage 3 extracts individual
balanced object spans and keeps those that parse and carry every
mandatory field, recovering the complete-record prefix of a payload
truncated mid-record. No input crashes the pipeline; the worst case is
an empty record list with stage marker 3.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .schema import MANDATORY_THREAT_FIELDS

_OPENERS = {"{": "}", "[": "]"}
_CLOSERS = {"}": "{", "]": "["}


@dataclass(frozen=True)
class RepairResult:
    records: list[dict]
    stage: int
    # Stage 1: the input itself; stage 2: input + appended closers;
    # stage 3: no whole-payload repair exists.
    repaired_text: str | None


def _records_from_payload(payload) -> list[dict]:
    """Normalize a parsed payload to a list of record dicts."""
    if isinstance(payload, list):
        return [item for item in payload if isinstance(item, dict)]
    if isinstance(payload, dict):
        if all(field in payload for field in MANDATORY_THREAT_FIELDS):
            return [payload]
        list_values = [v for v in payload.values() if isinstance(v, list)]
        if len(list_values) == 1:
            return [item for item in list_values[0] if isinstance(item, dict)]
        return [payload]
    return []


def _scan_open_delimiters(text: str) -> tuple[list[str], bool] | None:
    """Stack of unclosed delimiters and whether the scan ends inside a
    string literal. Returns None on structural corruption (a closer
    with no matching opener), which appending cannot fix."""
    stack: list[str] = []
    in_string = False
    escape = False
    for ch in text:
        if in_string:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch in _OPENERS:
            stack.append(ch)
        elif ch in _CLOSERS:
            if not stack or stack[-1] != _CLOSERS[ch]:
                return None
            stack.pop()
    return stack, in_string


def _balanced_object_span(text: str, start: int) -> int | None:
    """Index of the brace closing the object opened at ``start``."""
    depth = 0
    in_string = False
    escape = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return i
    return None


def _extract_records(text: str, mandatory: Sequence[str]) -> list[dict]:
    """Stage 3: harvest balanced object spans that parse strictly and
    carry every mandatory field. Nested objects are only considered
    when their parent span is not itself a valid record."""
    records: list[dict] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i] != "{":
            i += 1
            continue
        end = _balanced_object_span(text, i)
        if end is not None:
            candidate = text[i : end + 1]
            try:
                obj = json.loads(candidate)
            except json.JSONDecodeError:
                obj = None
            if isinstance(obj, dict) and all(field in obj for field in mandatory):
                records.append(obj)
                i = end + 1
                continue
        i += 1
    return records


def repair_output(raw: str, mandatory_fields: Iterable[str] = MANDATORY_THREAT_FIELDS) -> RepairResult:
    """Recover structured records from possibly truncated model output."""
    mandatory = tuple(mandatory_fields)

    # Stage 1: strict parse, input returned untouched.
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError:
        payload = _UNPARSED
    if payload is not _UNPARSED:
        return RepairResult(records=_records_from_payload(payload), stage=1, repaired_text=raw)

    # Stage 2: append missing closers in reverse-stack order. A scan
    # ending inside a string literal cannot be fixed by appending
    # closers (they would land inside the literal), so fall through.
    scan = _scan_open_delimiters(raw)
    if scan is not None:
        stack, in_string = scan
        if stack and not in_string:
            repaired = raw + "".join(_OPENERS[d] for d in reversed(stack))
            try:
                payload = json.loads(repaired)
            except json.JSONDecodeError:
                payload = _UNPARSED
            if payload is not _UNPARSED:
                return RepairResult(records=_records_from_payload(payload), stage=2, repaired_text=repaired)

    # Stage 3: per-record extraction.
    return RepairResult(records=_extract_records(raw, mandatory), stage=3, repaired_text=None)


class _Unparsed:
    __slots__ = ()


_UNPARSED = _Unparsed()
