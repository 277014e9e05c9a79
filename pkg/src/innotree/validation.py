"""Violation records shared by the structural validators.

Validators return violations as data instead of raising: an invalid model is
an analysable state, not a crash. Reports are sorted by (subject, rule,
message) so identical inputs always produce identical output.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class Violation:
    """One violated invariant.

    subject: the node id, group id, report id, or cube name at fault
    (empty string when the violation is global).
    rule: short machine-readable rule name.
    message: human-readable detail.
    """

    subject: str
    rule: str
    message: str

    def render(self) -> str:
        subject = self.subject or "(model)"
        return f"{subject}: {self.rule}: {self.message}"


def sorted_report(violations: list[Violation]) -> list[Violation]:
    """Deterministic ordering: subject, then rule name, then message."""
    return sorted(violations)
