"""Check records and verification reports (text and JSON)."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional


@dataclass
class CheckRecord:
    """One measured quantity compared against a bound.

    ``relation`` is ``"le"`` (measured <= bound + tol), ``"ge"``
    (measured >= bound - tol), ``"abs"`` (|measured - bound| <= tol) or
    ``"info"`` (always passes; reported only).
    """

    description: str
    measured: float
    bound: float
    tol: float
    relation: str
    anchor: str

    @property
    def passed(self) -> bool:
        m, b, t = self.measured, self.bound, self.tol
        if self.relation == "info":
            return True
        if not math.isfinite(m):
            return False
        if self.relation == "le":
            return m <= b + t
        if self.relation == "ge":
            return m >= b - t
        if self.relation == "abs":
            return abs(m - b) <= t
        raise ValueError(f"unknown relation {self.relation!r}")

    def line(self) -> str:
        sym = {"le": "<=", "ge": ">=", "abs": "~=", "info": ":"}[self.relation]
        flag = "PASS" if self.passed else "FAIL"
        if self.relation == "info":
            return f"[INFO] {self.description}: {self.measured:.6g}"
        return f"[{flag}] {self.description}: {self.measured:.6g} {sym} {self.bound:.6g} (tol {self.tol:.1e})"


@dataclass
class VerificationReport:
    suite: str
    records: list = field(default_factory=list)
    seed: Optional[int] = None
    meta: dict = field(default_factory=dict)

    def add(self, description: str, measured, bound, tol: float, relation: str, anchor: str) -> CheckRecord:
        if not anchor:
            raise ValueError("every record needs an anchor (use 'plumbing' for infrastructure checks)")
        rec = CheckRecord(description, float(measured), float(bound), float(tol), relation, anchor)
        self.records.append(rec)
        return rec

    def le(self, description, measured, bound, tol, anchor):
        return self.add(description, measured, bound, tol, "le", anchor)

    def ge(self, description, measured, bound, tol, anchor):
        return self.add(description, measured, bound, tol, "ge", anchor)

    def close(self, description, measured, target, tol, anchor):
        return self.add(description, measured, target, tol, "abs", anchor)

    def info(self, description, measured, anchor):
        return self.add(description, measured, float("nan"), 0.0, "info", anchor)

    def truth(self, description, ok: bool, anchor):
        """Boolean check recorded as 1/0 against 1."""
        return self.add(description, 1.0 if ok else 0.0, 1.0, 0.0, "abs", anchor)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list:
        return [r for r in self.records if not r.passed]

    def find(self, prefix: str) -> list:
        return [r for r in self.records if r.description.startswith(prefix)]

    def to_text(self) -> str:
        head = f"== {self.suite}: {'PASS' if self.passed else 'FAIL'} ({len(self.records)} checks"
        head += f", seed {self.seed})" if self.seed is not None else ")"
        return "\n".join([head] + ["  " + r.line() for r in self.records])

    def to_dict(self) -> dict:
        recs = []
        for r in self.records:
            d = asdict(r)
            d["passed"] = r.passed
            for k in ("measured", "bound", "tol"):
                if not math.isfinite(d[k]):
                    d[k] = None
            recs.append(d)
        return {"suite": self.suite, "passed": self.passed, "seed": self.seed, "meta": self.meta, "records": recs}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def merge(reports, name: str = "all") -> VerificationReport:
    out = VerificationReport(name)
    for r in reports:
        for rec in r.records:
            out.records.append(CheckRecord(f"{r.suite}: {rec.description}", rec.measured, rec.bound, rec.tol,
                                           rec.relation, rec.anchor))
        out.meta[r.suite] = r.meta
    return out
