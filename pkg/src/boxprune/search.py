"""Branch-and-prune: alternate propagation with bisection over a box tree.

Depth-first, left half before right half.  Each node is propagated to its
fixpoint; empty fixpoints are pruned (that subtree provably holds no
solution), boxes whose user variables are all narrower than eps are emitted
as atomic enclosures, and anything else is split at the midpoint of the
widest splittable user variable.  Soundness of the contractors makes the
emitted list complete: every solution of the system inside the initial box
lies in some emitted atomic box.

Split halves share their midpoint, so a solution sitting exactly on a cut
can legitimately surface in two adjacent enclosures.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

from .boxes import Box
from .contractors import TraceRecord
from .decompose import Csp
from .interval import Interval
from .propagation import Engine, propagate_worklist

__all__ = [
    "SolveStatus",
    "SolveStats",
    "SolveReport",
    "BudgetExceeded",
    "split",
    "is_splittable",
    "pick_split_var",
    "solve",
]


class SolveStatus(Enum):
    ENCLOSURES = "enclosures"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True, slots=True)
class SolveStats:
    contractor_applications: int
    max_depth: int
    # timing is informational; it never participates in report equality
    wall_clock_seconds: float = field(compare=False)


@dataclass(frozen=True, slots=True)
class SolveReport:
    """Outcome of a branch-and-prune run.

    ``atomic_boxes`` lists (box, path) pairs in the order found, which for
    depth-first left-first search is lexicographic in path ('0' = left
    half, '1' = right half, root = '').  ``pruned_boxes`` is populated only
    when pruning was asked to keep its evidence; ``traces`` only when
    per-node propagation traces were recorded.
    """

    atomic_boxes: tuple[tuple[Box, str], ...]
    pruned_count: int
    status: SolveStatus
    stats: SolveStats
    incomplete: bool = False
    pruned_boxes: tuple[tuple[Box, str], ...] | None = None
    traces: tuple[tuple[str, tuple[TraceRecord, ...]], ...] | None = None


class BudgetExceeded(RuntimeError):
    """Raised when one more atomic box would overflow max_boxes.

    Carries the partial report (everything found so far, flagged
    incomplete) so callers can still use it.
    """

    def __init__(self, max_boxes: int, report: SolveReport):
        super().__init__(f"atomic box budget of {max_boxes} exceeded; partial results kept")
        self.max_boxes = max_boxes
        self.report = report


def is_splittable(iv: Interval) -> bool:
    """True when the interval holds a midpoint strictly between its bounds."""
    if iv.is_empty:
        return False
    mid = iv.midpoint()
    return iv.lo < mid < iv.hi


def split(box: Box, var: str) -> tuple[Box, Box]:
    """Halve one variable at its midpoint; the halves share that endpoint."""
    iv = box[var]
    mid = iv.midpoint()
    if not iv.lo < mid < iv.hi:
        raise ValueError(f"{var} = {iv} cannot be split")
    return (
        box.with_intervals({var: Interval(iv.lo, mid)}),
        box.with_intervals({var: Interval(mid, iv.hi)}),
    )


def pick_split_var(box: Box, user_vars: tuple[str, ...], eps: float) -> str | None:
    """Widest splittable user variable with width > eps; ties go to the
    lexicographically first name; None when the box is atomic."""
    best: str | None = None
    best_width = eps
    for name in sorted(user_vars):
        iv = box[name]
        if iv.width > best_width and is_splittable(iv):
            best = name
            best_width = iv.width
    return best


def solve(
    csp: Csp,
    eps: float = 1e-10,
    max_boxes: int = 4096,
    *,
    engine: Engine = propagate_worklist,
    keep_pruned: bool = False,
    record_trace: bool = False,
) -> SolveReport:
    """Depth-first branch-and-prune from the CSP's initial box.

    Raises BudgetExceeded (carrying the partial report) rather than
    emitting an atomic box beyond max_boxes.
    """
    if not eps > 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    if max_boxes < 1:
        raise ValueError(f"max_boxes must be at least 1, got {max_boxes}")
    started = time.monotonic()
    atomic: list[tuple[Box, str]] = []
    pruned: list[tuple[Box, str]] = []
    pruned_count = 0
    applications = 0
    max_depth = 0
    traces: list[tuple[str, tuple[TraceRecord, ...]]] = []

    def report(incomplete: bool) -> SolveReport:
        status = SolveStatus.INFEASIBLE if not atomic else SolveStatus.ENCLOSURES
        return SolveReport(
            atomic_boxes=tuple(atomic),
            pruned_count=pruned_count,
            status=status,
            stats=SolveStats(
                contractor_applications=applications,
                max_depth=max_depth,
                wall_clock_seconds=time.monotonic() - started,
            ),
            incomplete=incomplete,
            pruned_boxes=tuple(pruned) if keep_pruned else None,
            traces=tuple(traces) if record_trace else None,
        )

    stack: list[tuple[str, Box]] = [("", csp.initial_box)]
    while stack:
        path, box = stack.pop()
        max_depth = max(max_depth, len(path))
        outcome = engine(csp, box, record_trace=record_trace)
        applications += outcome.steps
        if record_trace:
            traces.append((path, outcome.trace))
        fixpoint = outcome.fixpoint
        if fixpoint.is_empty:
            pruned_count += 1
            if keep_pruned:
                pruned.append((box, path))
            continue
        var = pick_split_var(fixpoint, csp.user_vars, eps)
        if var is None:
            if len(atomic) >= max_boxes:
                raise BudgetExceeded(max_boxes, report(incomplete=True))
            atomic.append((fixpoint, path))
            continue
        left, right = split(fixpoint, var)
        stack.append((path + "1", right))
        stack.append((path + "0", left))
    return report(incomplete=False)
