"""Exception hierarchy.

Three families map onto CLI exit codes: :class:`DomainError` (1),
:class:`ParseError` (2) and :class:`BudgetExceeded` (3).
"""

from __future__ import annotations

from typing import Any


class UcsError(Exception):
    """Base class for every error raised by this package."""


class DomainError(UcsError):
    """A well-formed input that violates a mathematical precondition."""


class BudgetExceeded(UcsError):
    """An explicit search budget ran out before the search completed.

    ``partial`` carries whatever the search had found so far; it is never a
    certified answer.
    """

    def __init__(self, message: str, partial: Any = None) -> None:
        super().__init__(message)
        self.partial = partial


class UnknownState(DomainError):
    pass


class UnknownInput(DomainError):
    pass


class NotStrict(DomainError):
    pass


class LengthMismatch(DomainError):
    pass


class NotAdmissible(DomainError):
    """A word set fails the admissible-family conditions.

    ``reason`` is one of ``shared-first-symbol``, ``coverage-inclusion``,
    ``empty-intersection``, ``final-inclusion``, ``point-outside-target`` or
    ``empty-family``; ``prefix`` is the offending word prefix, if any.
    """

    def __init__(self, reason: str, prefix: tuple = (), detail: str = "") -> None:
        msg = reason if not detail else f"{reason}: {detail}"
        super().__init__(msg)
        self.reason = reason
        self.prefix = prefix
        self.detail = detail


class NotControlledInvariant(DomainError):
    def __init__(self, violators: tuple) -> None:
        super().__init__(f"target is not controlled invariant; violating states: {list(violators)}")
        self.violators = violators


class ConditionsNotMet(DomainError):
    """Some of C.1-C.3 or the cover property fail for an input subset.

    ``report`` is the :class:`~ucs_entropy.spanning.CoverReport`;
    ``upper_bound`` is an enclosure of ``log2 rho(M_{Q,V})`` when ``V`` at
    least covers the target, else ``None``.
    """

    def __init__(self, report: Any, upper_bound: Any = None) -> None:
        failed = [name for name, ok in report.flags().items() if not ok]
        super().__init__(f"conditions not met: {', '.join(failed)}")
        self.report = report
        self.upper_bound = upper_bound


class NotACover(DomainError):
    pass


class NotInvariantCell(DomainError):
    def __init__(self, cell: str, escaping: tuple) -> None:
        super().__init__(f"cell {cell} leaves the target; escaping states: {list(escaping)}")
        self.cell = cell
        self.escaping = escaping


class HorizonZero(DomainError):
    pass


class NotQuasiPartition(DomainError):
    def __init__(self, violations: tuple) -> None:
        super().__init__("cover is not a quasi-invariant-partition: " + "; ".join(map(str, violations)))
        self.violations = violations


class EmptyResidualCell(DomainError):
    def __init__(self, cell: str) -> None:
        super().__init__(f"cell {cell} is contained in the union of earlier cells")
        self.cell = cell


class NotAtomRefinable(DomainError):
    def __init__(self, witness: tuple) -> None:
        x, a, b = witness
        super().__init__(f"#(F({x},{a}) & Q_{b}) > 1, no atom refinement")
        self.witness = witness


class OrderMismatch(DomainError):
    pass


class NonConvergence(DomainError):
    pass


class SearchBudgetExceeded(BudgetExceeded):
    pass


class CycleBudgetExceeded(BudgetExceeded):
    pass


class ParseError(UcsError):
    """Carries the full, ordered list of source diagnostics."""

    def __init__(self, diagnostics: list) -> None:
        super().__init__("\n".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics
