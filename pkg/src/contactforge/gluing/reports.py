"""Structured verification reports shared by the gluing verifiers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..symcalc import DifferentialForm
from ..symcalc.sexpr import form_to_sexp

PASS = "pass"
FAIL = "fail"


@dataclass
class IdentityCheck:
    """One verified clause: a claim, a stable anchor id, and the outcome.

    `difference` carries the serialized nonzero difference form on
    failure and is empty on success.
    """

    claim: str
    anchor: str
    status: str
    difference: str = ""
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def as_dict(self) -> dict:
        out = {
            "claim": self.claim,
            "anchor": self.anchor,
            "status": self.status,
            "difference": self.difference,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class IdentityReport:
    name: str
    checks: list[IdentityCheck] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self) -> IdentityCheck | None:
        for check in self.checks:
            if not check.passed:
                return check
        return None

    def add_identity(
        self,
        claim: str,
        anchor: str,
        left: DifferentialForm,
        right: DifferentialForm,
        detail: dict | None = None,
    ) -> IdentityCheck:
        """Record an exact form identity; the difference form is the witness."""
        difference = left - right
        check = IdentityCheck(
            claim=claim,
            anchor=anchor,
            status=PASS if difference.is_zero else FAIL,
            difference="" if difference.is_zero else form_to_sexp(difference),
            detail=detail or {},
        )
        self.checks.append(check)
        return check

    def add_condition(
        self, claim: str, anchor: str, ok: bool, detail: dict | None = None
    ) -> IdentityCheck:
        check = IdentityCheck(
            claim=claim,
            anchor=anchor,
            status=PASS if ok else FAIL,
            detail=detail or {},
        )
        self.checks.append(check)
        return check

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "status": PASS if self.passed else FAIL,
            "checks": [c.as_dict() for c in self.checks],
            "notes": self.notes,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.as_dict(), indent=indent, sort_keys=False)
