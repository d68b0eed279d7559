"""Replays a proof script against a rebuilt SEP."""

from __future__ import annotations

from dataclasses import dataclass

from .build import FormatError, build
from .lia import refutes


@dataclass(frozen=True)
class Accepted:
    steps: int


@dataclass(frozen=True)
class Rejected:
    reason: str
    step: int | None = None
    path: tuple[str, ...] = ()

    def __str__(self) -> str:
        where = "" if self.step is None else f" at step {self.step}"
        if self.path:
            where += f" (goal {'/'.join(self.path)})"
        return f"{self.reason}{where}"


def _parse_step(text):
    if not isinstance(text, str):
        return None
    words = text.split(" ")
    if words in (["intro"], ["split"]):
        return (words[0],)
    if len(words) == 3 and words[0] == "arith" and words[1].isdigit() and words[2] in ("ok", "contradiction"):
        return ("arith", int(words[1]), words[2])
    return None


def replay(sep, proof: list) -> Accepted | Rejected:
    goals = [(sep, (), ())]  # (node, path, hypotheses)
    leaf = 0
    for i, raw in enumerate(proof):
        step = _parse_step(raw)
        if step is None:
            return Rejected(f"unreadable step {raw!r}", i)
        if not goals:
            return Rejected("proof has more steps than goals", i)
        node, path, hyps = goals.pop()
        kind = node[0]
        if step[0] == "intro":
            if kind == "forall":
                goals.append((node[2], path + ("forall",), hyps))
            elif kind == "imp":
                goals.append((node[2], path + ("implies",), hyps + (node[1],)))
            else:
                return Rejected(f"intro applied to a {kind} goal", i, path)
        elif step[0] == "split":
            if kind != "conj":
                return Rejected(f"split applied to a {kind} goal", i, path)
            goals.append((node[2], path + ("right",), hyps))
            goals.append((node[1], path + ("left",), hyps))
        else:
            _, idx, verdict = step
            if kind not in ("holds", "true", "false"):
                return Rejected(f"arith applied to a {kind} goal", i, path)
            if idx != leaf:
                return Rejected(f"leaf index {idx} does not match expected {leaf}", i, path)
            leaf += 1
            if kind == "true":
                if verdict != "ok":
                    return Rejected("True leaf must be closed with ok", i, path)
            elif kind == "false":
                if verdict != "contradiction" or not refutes(hyps):
                    return Rejected("False leaf under consistent hypotheses", i, path)
            elif verdict == "ok":
                if refutes(hyps):
                    return Rejected("hypotheses are contradictory; expected contradiction", i, path)
                if not refutes(hyps, node[1]):
                    return Rejected("obligation not entailed by hypotheses", i, path)
            elif not refutes(hyps):
                return Rejected("hypotheses are not contradictory", i, path)
    if goals:
        return Rejected("proof ended with open goals", len(proof), goals[-1][1])
    return Accepted(len(proof))


def check_proof(func_text: str, proof: list) -> Accepted | Rejected:
    try:
        sep = build(func_text)
    except (FormatError, ValueError) as e:
        return Rejected(f"malformed function: {e}")
    if not isinstance(proof, list) or not proof:
        return Rejected("proof must be a nonempty list")
    return replay(sep, proof)
