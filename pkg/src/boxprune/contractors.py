"""Contraction operators for the primitive relations sum, mul, sq, const.

Each ``contract_*`` function narrows its argument intervals to a box
enclosing exactly the tuples of the relation that lie inside the input box,
discarding no solution (correctness) and never growing an interval
(contraction).  The narrowing rules are iterated to a local fixpoint inside
one call, which makes every contractor idempotent bit for bit under
directed rounding, not just in exact arithmetic.

``apply_lifted`` runs a contractor on a full box through the constraint's
argument variables.  A variable repeated across argument positions is
narrowed per occurrence and the occurrences intersected, iterating until
stable, so e.g. sq(x, x) narrows x toward the hull of {0, 1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .boxes import Box, empty_box
from .interval import (
    EMPTY,
    FULL,
    Interval,
    _mk,
    add,
    div_down,
    div_up,
    mul,
    sqrt_outer,
    square,
    sub,
)

__all__ = [
    "Constraint",
    "TraceRecord",
    "contract_sum",
    "contract_mul",
    "contract_sq",
    "contract_const",
    "extdiv",
    "apply_lifted",
    "big_gamma",
]

_ARITY = {"sum": 3, "mul": 3, "sq": 2, "const": 1}


@dataclass(frozen=True, slots=True)
class Constraint:
    """One primitive constraint over named variables.

    kind "sum":   args (x, y, z) meaning x + y = z
    kind "mul":   args (x, y, z) meaning x * y = z
    kind "sq":    args (x, y) meaning x^2 = y
    kind "const": args (x,) meaning x = value (value finite)

    ``cid`` is a small integer, unique within one constraint system.
    ``variables`` holds the argument variables in first-occurrence order
    with duplicates removed; it is computed once at construction.
    """

    kind: str
    args: tuple[str, ...]
    cid: int
    value: float | None = None
    variables: tuple[str, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in _ARITY:
            raise ValueError(f"unknown constraint kind: {self.kind!r}")
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {_ARITY[self.kind]} arguments, got {len(self.args)}")
        if self.kind == "const":
            if self.value is None or not math.isfinite(self.value):
                raise ValueError("const requires a finite value")
        elif self.value is not None:
            raise ValueError(f"{self.kind} does not take a value")
        seen: dict[str, None] = {}
        for a in self.args:
            seen.setdefault(a)
        object.__setattr__(self, "variables", tuple(seen))


@dataclass(frozen=True, slots=True)
class TraceRecord:
    """One contractor application: the constraint and its before/after slices."""

    cid: int
    kind: str
    before: Box
    after: Box
    changed: bool

    def to_text(self) -> str:
        tag = "changed" if self.changed else "nochange"
        return f"c{self.cid} {self.kind} {self.before} -> {self.after} {tag}"

    def to_json_obj(self) -> dict:
        return {
            "cid": self.cid,
            "kind": self.kind,
            "before": self.before.to_json_obj(),
            "after": self.after.to_json_obj(),
            "changed": self.changed,
        }


_EMPTY3 = (EMPTY, EMPTY, EMPTY)
_EMPTY2 = (EMPTY, EMPTY)


def contract_sum(x: Interval, y: Interval, z: Interval) -> tuple[Interval, Interval, Interval]:
    """Narrow (x, y, z) around { (a, b, c) in x*y*z : a + b = c }."""
    while True:
        x1 = x.intersect(sub(z, y))
        y1 = y.intersect(sub(z, x1))
        z1 = z.intersect(add(x1, y1))
        if x1.lo > x1.hi or y1.lo > y1.hi or z1.lo > z1.hi:
            return _EMPTY3
        # intersect returns its receiver when stable, so identity detects
        # the fixpoint
        if x1 is x and y1 is y and z1 is z:
            return x1, y1, z1
        x, y, z = x1, y1, z1


def contract_sq(x: Interval, y: Interval) -> tuple[Interval, Interval]:
    """Narrow (x, y) around { (a, b) in x*y : a^2 = b }."""
    while True:
        y1 = y.intersect(square(x))
        root = sqrt_outer(y1)
        if root.lo > root.hi:
            return _EMPTY2
        neg = _mk(-root.hi, -root.lo)
        x1 = x.intersect(root).hull(x.intersect(neg))
        if x1.lo > x1.hi:
            return _EMPTY2
        if x1.lo == x.lo and x1.hi == x.hi:
            # the hull can rebuild an equal interval; keep the old object
            # so that identity keeps meaning "no change" for callers
            x1 = x
            if y1 is y:
                return x1, y1
        x, y = x1, y1


def contract_mul(x: Interval, y: Interval, z: Interval) -> tuple[Interval, Interval, Interval]:
    """Narrow (x, y, z) around { (a, b, c) in x*y*z : a * b = c }."""
    while True:
        z1 = z.intersect(mul(x, y))
        x1 = x.intersect(extdiv(z1, y))
        y1 = y.intersect(extdiv(z1, x1))
        if x1.lo > x1.hi or y1.lo > y1.hi or z1.lo > z1.hi:
            return _EMPTY3
        if x1 is x and y1 is y and z1 is z:
            return x1, y1, z1
        x, y, z = x1, y1, z1


def contract_const(c: float, x: Interval) -> Interval:
    return x.intersect(Interval(c, c))


def extdiv(n: Interval, d: Interval) -> Interval:
    """Interval hull of { a / b : a in n, b in d, b != 0 }.

    When the divisor strictly straddles zero the exact preimage is a union
    of two rays whose hull is the whole line; this returns that hull.  A
    divisor touching zero on one side yields a single ray.
    """
    if n.lo > n.hi or d.lo > d.hi:
        return EMPTY
    if d.lo == 0.0 == d.hi:
        return FULL if n.contains(0.0) else EMPTY
    if d.lo < 0.0 < d.hi:
        return FULL
    if d.lo == 0.0:
        if n.lo <= 0.0 <= n.hi:
            return FULL
        if n.lo > 0.0:
            return _mk(div_down(n.lo, d.hi), math.inf)
        return _mk(-math.inf, div_up(n.hi, d.hi))
    if d.hi == 0.0:
        if n.lo <= 0.0 <= n.hi:
            return FULL
        if n.lo > 0.0:
            return _mk(-math.inf, div_up(n.lo, d.lo))
        return _mk(div_down(n.hi, d.lo), math.inf)
    if d.lo > 0.0:
        lo = div_down(n.lo, d.hi) if n.lo >= 0.0 else div_down(n.lo, d.lo)
        hi = div_up(n.hi, d.lo) if n.hi >= 0.0 else div_up(n.hi, d.hi)
    else:
        lo = div_down(n.hi, d.hi) if n.hi > 0.0 else div_down(n.hi, d.lo)
        hi = div_up(n.lo, d.hi) if n.lo < 0.0 else div_up(n.lo, d.lo)
    return _mk(lo, hi)


def _contract(con: Constraint, ivs: tuple[Interval, ...]) -> tuple[Interval, ...]:
    if con.kind == "sum":
        return contract_sum(*ivs)
    if con.kind == "mul":
        return contract_mul(*ivs)
    if con.kind == "sq":
        return contract_sq(*ivs)
    return (contract_const(con.value, ivs[0]),)


def apply_lifted(con: Constraint, box: Box) -> Box:
    """Contract `box` through `con`, leaving variables outside `con` untouched.

    The result has the same scope as the input and is the empty box over
    that scope whenever the constraint is infeasible inside the input.
    """
    bivs = box._ivs
    for v in con.variables:
        if v not in bivs:
            raise ValueError(f"constraint variable {v!r} outside box scope")
    if box.is_empty:
        return box
    args = con.args
    if len(con.variables) == len(args):
        # distinct argument variables: one application is already the local
        # fixpoint because every contractor is idempotent bit for bit, and
        # each output slot is the input object itself whenever it did not
        # shrink
        ivs = tuple(map(bivs.__getitem__, args))
        out = _contract(con, ivs)
        changed = False
        for new, old in zip(out, ivs):
            if new is not old:
                if new.lo > new.hi:
                    return empty_box(box.names)
                changed = True
        if not changed:
            return box
        nivs = dict(bivs)
        for a, new in zip(args, out):
            nivs[a] = new
        return Box._from_sorted(nivs)
    # a repeated variable couples argument slots, so re-run the contractor
    # with the occurrences intersected until that stabilizes
    cur = {v: bivs[v] for v in con.variables}
    changed = False
    while True:
        out = _contract(con, tuple(cur[a] for a in args))
        stepped = False
        for a, iv in zip(args, out):
            old = cur[a]
            new = old.intersect(iv)
            if new is not old:
                if new.lo > new.hi:
                    return empty_box(box.names)
                cur[a] = new
                stepped = True
        if not stepped:
            break
        changed = True
    if not changed:
        return box
    nivs = dict(bivs)
    nivs.update(cur)
    return Box._from_sorted(nivs)


def big_gamma(csp, box: Box) -> Box:
    """Intersection of all constraints' lifted contractions applied to `box`.

    Every constraint sees the same input box (simultaneous application);
    the results are intersected componentwise.  Reference operator for the
    propagation engines, which reach its limit by fair iteration.
    """
    result = box
    for con in csp.constraints:
        result = result.join(apply_lifted(con, box))
    return result
