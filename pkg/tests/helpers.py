"""Shared builders and frozen reference constants for the test suite.

The numeric constants were produced by the brute-force oracle (bisection at
1e-15 tolerance, cross-checked against mpmath) and then frozen here;
test_oracle re-derives them so any drift in the oracle would be caught.
"""

from __future__ import annotations

import random

from boxprune import (
    Box,
    Constraint,
    Csp,
    FULL,
    Interval,
    contract_const,
    contract_mul,
    contract_sq,
    contract_sum,
)

# Positive root of x^4 + x^2 = 1, i.e. x = sqrt((sqrt(5) - 1) / 2).
# Frozen from bisect_root; the correctly rounded root is X_STAR_DOWN,
# one ulp below, and every enclosure must contain both.
X_STAR = 0.7861513777574234
X_STAR_DOWN = 0.7861513777574233
# (sqrt(5) - 1) / 2
Y_STAR = 0.6180339887498949
# sqrt(3) / 2: the y upper bound once z has been capped at 3/4
SQRT3_HALF = 0.8660254037844386

QUARTIC_UNIT = """\
var x in [0, 1];
var y in [0, 1];
constraint y = x^2;
constraint x^2 + y^2 = 1;
"""

QUARTIC_WIDE = """\
var x in [-2, 2];
var y in [-2, 2];
constraint y = x^2;
constraint x^2 + y^2 = 1;
"""


def make_csp(constraints, bindings, user_vars=None) -> Csp:
    """Wrap hand-built constraints plus an initial box into a Csp."""
    box = bindings if isinstance(bindings, Box) else Box(bindings)
    return Csp(
        constraints=tuple(constraints),
        variables=box.scope,
        user_vars=tuple(box.names) if user_vars is None else tuple(user_vars),
        initial_box=box,
        source_equations=(),
        declarations=tuple(box.items()),
        aux_defs=(),
    )


def quartic_csp_xyzu() -> Csp:
    """y = x^2, z = y^2, y + z = u, u = 1 over explicitly named variables.

    Constraint ids follow the order a narration-friendly trace applies
    them: sq(x,y) first, then the constant, the sum, and finally sq(y,z),
    so that z's upper bound narrows (via the sum) before its lower bound
    does (via sq(y,z)).  Trace-shape tests rely on this id order.
    """
    cons = (
        Constraint("sq", ("x", "y"), cid=0),
        Constraint("const", ("u",), cid=1, value=1.0),
        Constraint("sum", ("y", "z", "u"), cid=2),
        Constraint("sq", ("y", "z"), cid=3),
    )
    box = Box(
        {
            "x": Interval(0.0, 1.0),
            "y": Interval(0.0, 1.0),
            "z": FULL,
            "u": FULL,
        }
    )
    return make_csp(cons, box)


def left_half_box() -> Box:
    return Box(
        {
            "x": Interval(0.0, 0.5),
            "y": Interval(0.0, 1.0),
            "z": Interval(0.0, 1.0),
            "u": Interval(1.0, 1.0),
        }
    )


def right_half_box() -> Box:
    return Box(
        {
            "x": Interval(0.5, 1.0),
            "y": Interval(0.0, 1.0),
            "z": Interval(0.0, 1.0),
            "u": Interval(1.0, 1.0),
        }
    )


# Randomized contractor-law machinery, shared by the unit tests (small
# scale) and the acceptance suite (full scale).  All sampled values are
# dyadic (k/8 in [-4, 4]) so sums, products, and squares are exact in
# double precision and relation membership can be decided without
# tolerances.

_GRID = [k / 8.0 for k in range(-32, 33)]


def random_interval(rng: random.Random) -> Interval:
    r = rng.random()
    if r < 0.05:
        return FULL
    lo = rng.choice(_GRID)
    hi = rng.choice(_GRID)
    if lo > hi:
        lo, hi = hi, lo
    if r < 0.10:
        return Interval(float("-inf"), hi)
    if r < 0.15:
        return Interval(lo, float("inf"))
    if r < 0.17:
        return Interval(lo, lo)
    return Interval(lo, hi)


def grid_points_in(iv: Interval) -> list[float]:
    return [g for g in _GRID if iv.contains(g)]


def widen_interval(rng: random.Random, iv: Interval) -> Interval:
    """A random superset of iv with dyadic slack."""
    if iv.is_empty:
        return random_interval(rng)
    lo = iv.lo if iv.lo == float("-inf") else iv.lo - rng.choice((0.0, 0.125, 0.5, 1.0))
    hi = iv.hi if iv.hi == float("inf") else iv.hi + rng.choice((0.0, 0.125, 0.5, 1.0))
    return Interval(lo, hi)


def random_instance(rng: random.Random, kind: str):
    if kind == "sum" or kind == "mul":
        return (random_interval(rng), random_interval(rng), random_interval(rng))
    if kind == "sq":
        return (random_interval(rng), random_interval(rng))
    if kind == "const":
        return (rng.choice(_GRID), random_interval(rng))
    raise ValueError(kind)


def contract(kind: str, ivs):
    if kind == "sum":
        return contract_sum(*ivs)
    if kind == "mul":
        return contract_mul(*ivs)
    if kind == "sq":
        return contract_sq(*ivs)
    if kind == "const":
        return (contract_const(ivs[0], ivs[1]),)
    raise ValueError(kind)


def sample_relation_points(rng: random.Random, kind: str, ivs, tries: int):
    """Exact relation members inside the instance box, found by sampling."""
    points = []
    if kind == "const":
        value, x = ivs
        if x.contains(value):
            points.append((value,))
        return points
    if kind == "sq":
        x, y = ivs
        xs = grid_points_in(x)
        if not xs:
            return points
        for _ in range(tries):
            a = rng.choice(xs)
            b = a * a
            if y.contains(b):
                points.append((a, b))
        return points
    x, y, z = ivs
    xs, ys = grid_points_in(x), grid_points_in(y)
    if not xs or not ys:
        return points
    for _ in range(tries):
        a, b = rng.choice(xs), rng.choice(ys)
        c = a + b if kind == "sum" else a * b
        if z.contains(c):
            points.append((a, b, c))
    return points


def check_contractor_laws(rng: random.Random, kind: str, instances: int, point_tries: int) -> int:
    """Idempotence, contraction, monotonicity, correctness on random boxes.

    Returns the number of exact relation points whose membership in the
    contracted box was verified.
    """
    iv_count = 1 if kind == "const" else (2 if kind == "sq" else 3)
    points_checked = 0
    for _ in range(instances):
        inst = random_instance(rng, kind)
        once = contract(kind, inst)
        twice = contract(kind, once if kind != "const" else (inst[0], once[0]))
        assert once == twice, f"{kind} not idempotent on {inst}"

        ins = inst[1:] if kind == "const" else inst
        assert all(o.is_subset(i) for o, i in zip(once, ins)), f"{kind} grew an interval on {inst}"

        if kind == "const":
            wide = (inst[0], widen_interval(rng, inst[1]))
        else:
            wide = tuple(widen_interval(rng, iv) for iv in inst)
        bigger = contract(kind, wide)
        assert all(
            small.is_subset(big) for small, big in zip(once, bigger)
        ), f"{kind} not monotonic on {inst} vs {wide}"

        for point in sample_relation_points(rng, kind, inst, point_tries):
            assert all(
                once[k].contains(v) for k, v in enumerate(point)
            ), f"{kind} dropped the solution {point} from {inst}"
            points_checked += 1
        assert len(once) == iv_count
    return points_checked
