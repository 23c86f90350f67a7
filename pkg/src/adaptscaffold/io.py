"""Versioned line-delimited record files and single-document artifacts."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Iterable, Optional

from .drl.ddqn import Transition
from .records import AttemptRecord, SessionLog

SESSIONS = "adaptscaffold.sessions"
TRANSITIONS = "adaptscaffold.transitions"
BOUNDS = "adaptscaffold.bounds"
VERSION = 1


class SchemaError(ValueError):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def header(schema: str, config_hash: str, master_seed: int, **extra) -> dict:
    return {"schema": schema, "version": VERSION, "configHash": config_hash, "masterSeed": master_seed, **extra}


def write_jsonl(path: Path, head: dict, rows: Iterable[dict]) -> None:
    lines = [_dump(head)] + [_dump(r) for r in rows]
    atomic_write(path, "\n".join(lines) + "\n")


def read_jsonl(path: Path, schema: str) -> tuple[dict, list[dict]]:
    with open(path) as fh:
        first = fh.readline()
        if not first.strip():
            raise SchemaError(f"{path} is empty")
        head = json.loads(first)
        check_header(head, schema, path)
        rows = [json.loads(line) for line in fh if line.strip()]
    return head, rows


def check_header(head: dict, schema: str, path) -> None:
    if head.get("schema") != schema:
        raise SchemaError(f"{path}: expected schema {schema!r}, found {head.get('schema')!r}")
    if head.get("version") != VERSION:
        raise SchemaError(f"{path}: unsupported {schema} version {head.get('version')!r}")


def write_sessions(path: Path, logs: Iterable[SessionLog], head: dict) -> None:
    write_jsonl(path, head, ({"condition": log.condition, **r.to_dict()} for log in logs for r in log.attempts))


def read_sessions(path: Path) -> tuple[dict, list[SessionLog]]:
    head, rows = read_jsonl(path, SESSIONS)
    logs: dict[str, SessionLog] = {}
    for row in rows:
        sid = row["student"]
        if sid not in logs:
            logs[sid] = SessionLog(sid, row["condition"])
        logs[sid].attempts.append(AttemptRecord.from_dict(row))
    return head, list(logs.values())


def write_transitions(path: Path, transitions: Iterable[Transition], head: dict) -> None:
    write_jsonl(path, head, (t.to_dict() for t in transitions))


def read_transitions(path: Path) -> tuple[dict, list[Transition]]:
    head, rows = read_jsonl(path, TRANSITIONS)
    return head, [Transition.from_dict(r) for r in rows]


def write_json(path: Path, doc: dict) -> None:
    atomic_write(path, json.dumps(doc, indent=1, sort_keys=True) + "\n")


def read_json(path: Path, schema: Optional[str] = None) -> dict:
    doc = json.loads(Path(path).read_text())
    if schema is not None:
        check_header(doc.get("header", {}), schema, path)
    return doc
