"""Proof certificates: emission, sealing and independent checking.

A certificate is UTF-8 JSON with the keys, in order::

    format_version  integer, currently 1
    source_digest   hex SHA-256 of the source text, or null
    func            canonical S-expression of the function
    proof           list of "intro" | "split" | "arith <leaf> <ok|contradiction>"
    digest          hex SHA-256 over the four fields above
    metadata        {"tool": ..., "timestamp": ...}; not covered by the digest
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import __version__
from . import cx_ast as A
from .checker import Accepted, Rejected, check_proof
from .parser import ParseError, SourceProgram, parse_program

FORMAT_VERSION = 1
SUFFIX = ".vfxcert"


def source_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def seal(format_version, source_digest, func: str, proof: list) -> str:
    covered = json.dumps(
        {"format_version": format_version, "source_digest": source_digest, "func": func, "proof": proof},
        sort_keys=False,
        separators=(",", ":"),
        ensure_ascii=False,
    )
    return hashlib.sha256(covered.encode("utf-8")).hexdigest()


@dataclass
class Certificate:
    format_version: int
    source_digest: str | None
    func: str
    proof: list[str]
    digest: str = ""
    metadata: dict = field(default_factory=dict)

    def resealed(self) -> Certificate:
        self.digest = seal(self.format_version, self.source_digest, self.func, self.proof)
        return self

    def to_json(self) -> str:
        body = {
            "format_version": self.format_version,
            "source_digest": self.source_digest,
            "func": self.func,
            "proof": self.proof,
            "digest": self.digest,
            "metadata": self.metadata,
        }
        return json.dumps(body, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> Certificate:
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("certificate must be a JSON object")
        missing = {"format_version", "source_digest", "func", "proof", "digest"} - set(data)
        if missing:
            raise ValueError(f"certificate lacks {', '.join(sorted(missing))}")
        return cls(
            data["format_version"], data["source_digest"], data["func"], data["proof"],
            data["digest"], data.get("metadata") or {},
        )


def emit(f: A.Func, trace, source: SourceProgram | str | None = None, timestamp: str | None = None) -> Certificate:
    """Certificate for ``f`` from a successful proof trace."""
    text = source.text if isinstance(source, SourceProgram) else source
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    cert = Certificate(
        FORMAT_VERSION,
        None if text is None else source_digest(text),
        A.dumps(f),
        [str(s) for s in trace],
        metadata={"tool": f"vfx {__version__}", "timestamp": timestamp},
    )
    return cert.resealed()


def check(cert: Certificate, source: SourceProgram | None = None) -> Accepted | Rejected:
    if cert.format_version != FORMAT_VERSION:
        return Rejected(f"unsupported format version {cert.format_version!r}")
    if not isinstance(cert.func, str) or not isinstance(cert.proof, list):
        return Rejected("malformed certificate fields")
    if cert.digest != seal(cert.format_version, cert.source_digest, cert.func, cert.proof):
        return Rejected("digest does not match certificate contents")
    if source is not None:
        if cert.source_digest != source_digest(source.text):
            return Rejected("source digest mismatch")
        try:
            parsed = parse_program(source)
        except ParseError as e:
            return Rejected(f"source does not parse: {e}")
        if A.dumps(parsed) != cert.func:
            return Rejected("AST mismatch between source and certificate")
    return check_proof(cert.func, cert.proof)
