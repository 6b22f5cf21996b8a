"""Fixpoint propagation: drive the per-constraint contractors to a common fixpoint.

Three scheduling disciplines are provided.  All of them apply one lifted
contractor at a time and stop when no application can change the box any
more; because every contractor only ever shrinks intervals and float bounds
form finite chains, termination needs no damping or epsilon cutoffs.  The
disciplines visit constraints in different orders, but they land on the
same box: each contractor is shrinking, order-preserving, and idempotent,
which makes the common fixpoint unique for a given start box.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .boxes import Box
from .contractors import TraceRecord, apply_lifted, big_gamma
from .decompose import Csp, var_index

__all__ = [
    "Status",
    "PropagationOutcome",
    "propagate_roundrobin",
    "propagate_worklist",
    "propagate_random",
    "gamma_power",
    "get_engine",
    "Engine",
]


class Status(Enum):
    FEASIBLE_UNKNOWN = "feasible-unknown"
    PROVED_EMPTY = "proved-empty"


@dataclass(frozen=True, slots=True)
class PropagationOutcome:
    """Result of running a propagation engine to quiescence.

    ``steps`` counts contractor applications, ``effective_steps`` the ones
    that changed at least one interval.  ``trace`` is None unless recording
    was requested.
    """

    fixpoint: Box
    status: Status
    steps: int
    effective_steps: int
    trace: tuple[TraceRecord, ...] | None = None


Engine = Callable[..., PropagationOutcome]

_DEFAULT_MAX_STEPS = 1_000_000


def _overran(engine: str, budget: int, unit: str) -> RuntimeError:
    return RuntimeError(
        f"{engine} propagation exceeded {budget} {unit}; "
        "this should be impossible for shrinking contractors and indicates a bug"
    )


def _check_scope(csp: Csp, box: Box) -> None:
    if box.scope != csp.variables:
        missing = sorted(csp.variables - box.scope)
        extra = sorted(box.scope - csp.variables)
        raise ValueError(f"box scope does not match the CSP's variables (missing {missing}, extra {extra})")


def _finish(box: Box, steps: int, effective: int, trace, record_trace: bool) -> PropagationOutcome:
    status = Status.PROVED_EMPTY if box.is_empty else Status.FEASIBLE_UNKNOWN
    return PropagationOutcome(
        fixpoint=box,
        status=status,
        steps=steps,
        effective_steps=effective,
        trace=tuple(trace) if record_trace else None,
    )


def _apply_traced(con, box: Box, trace, record_trace: bool) -> tuple[Box, bool]:
    after = apply_lifted(con, box)
    # apply_lifted returns the input box object itself exactly when nothing
    # shrank, so identity decides change
    changed = after is not box
    if record_trace:
        svars = sorted(con.variables)
        bivs = box._ivs
        before = Box._from_sorted({v: bivs[v] for v in svars})
        if changed:
            aivs = after._ivs
            after_slice = Box._from_sorted({v: aivs[v] for v in svars})
        else:
            after_slice = before
        trace.append(
            TraceRecord(
                cid=con.cid,
                kind=con.kind,
                before=before,
                after=after_slice,
                changed=changed,
            )
        )
    return after, changed


def propagate_roundrobin(
    csp: Csp,
    box: Box,
    *,
    record_trace: bool = False,
    max_rounds: int = _DEFAULT_MAX_STEPS,
) -> PropagationOutcome:
    """Sweep constraints in id order until one full sweep changes nothing."""
    _check_scope(csp, box)
    trace: list[TraceRecord] = []
    steps = effective = 0
    if box.is_empty or not csp.constraints:
        return _finish(box, steps, effective, trace, record_trace)
    for _ in range(max_rounds):
        sweep_changed = False
        for con in csp.constraints:
            box, changed = _apply_traced(con, box, trace, record_trace)
            steps += 1
            if changed:
                effective += 1
                sweep_changed = True
            if box.is_empty:
                return _finish(box, steps, effective, trace, record_trace)
        if not sweep_changed:
            return _finish(box, steps, effective, trace, record_trace)
    raise _overran("round-robin", max_rounds, "rounds")


def propagate_worklist(
    csp: Csp,
    box: Box,
    *,
    record_trace: bool = False,
    max_steps: int = _DEFAULT_MAX_STEPS,
) -> PropagationOutcome:
    """FIFO worklist: a changed variable requeues every constraint on it.

    The queue starts holding all constraints in id order and never holds a
    constraint twice.  When an application changes some variables, every
    constraint whose scope mentions one of them (the applied one included)
    is appended again unless already queued.
    """
    _check_scope(csp, box)
    trace: list[TraceRecord] = []
    steps = effective = 0
    if box.is_empty or not csp.constraints:
        return _finish(box, steps, effective, trace, record_trace)
    watchers = var_index(csp)
    by_id = {con.cid: con for con in csp.constraints}
    queue = deque(con.cid for con in csp.constraints)
    queued = set(queue)
    while queue:
        if steps >= max_steps:
            raise _overran("worklist", max_steps, "contractor applications")
        cid = queue.popleft()
        queued.discard(cid)
        con = by_id[cid]
        before = box
        box, changed = _apply_traced(con, box, trace, record_trace)
        steps += 1
        if box.is_empty:
            effective += 1
            return _finish(box, steps, effective, trace, record_trace)
        if changed:
            effective += 1
            for v in con.variables:
                # components keep their object when untouched, so identity
                # spots the shrunk ones
                if box[v] is not before[v]:
                    for watcher in watchers[v]:
                        if watcher not in queued:
                            queue.append(watcher)
                            queued.add(watcher)
    return _finish(box, steps, effective, trace, record_trace)


def propagate_random(
    csp: Csp,
    box: Box,
    seed: int,
    *,
    record_trace: bool = False,
    max_steps: int = _DEFAULT_MAX_STEPS,
) -> PropagationOutcome:
    """Apply uniformly random constraints until all are simultaneously stable.

    Keeps the set of constraints known to be at fixpoint for the current
    box; an effective application invalidates every constraint sharing a
    changed variable.  Deterministic for a given seed.
    """
    _check_scope(csp, box)
    trace: list[TraceRecord] = []
    steps = effective = 0
    if box.is_empty or not csp.constraints:
        return _finish(box, steps, effective, trace, record_trace)
    rng = random.Random(seed)
    watchers = var_index(csp)
    by_id = {con.cid: con for con in csp.constraints}
    unstable = set(by_id)
    while unstable:
        if steps >= max_steps:
            raise _overran("random-order", max_steps, "contractor applications")
        pool = sorted(unstable)
        cid = pool[rng.randrange(len(pool))]
        con = by_id[cid]
        before = box
        box, changed = _apply_traced(con, box, trace, record_trace)
        steps += 1
        if box.is_empty:
            effective += 1
            return _finish(box, steps, effective, trace, record_trace)
        if changed:
            effective += 1
            for v in con.variables:
                if box[v] is not before[v]:
                    unstable.update(watchers[v])
        # either way the applied constraint sits at its own fixpoint now
        unstable.discard(cid)
    return _finish(box, steps, effective, trace, record_trace)


def gamma_power(csp: Csp, box: Box, k: int) -> Box:
    """k rounds of the simultaneous all-constraints operator."""
    for _ in range(k):
        box = big_gamma(csp, box)
    return box


def get_engine(spec: str) -> Engine:
    """Engine by name: 'roundrobin', 'worklist', or 'random:<seed>'."""
    if spec == "roundrobin":
        return propagate_roundrobin
    if spec == "worklist":
        return propagate_worklist
    if spec.startswith("random:"):
        tail = spec.split(":", 1)[1]
        try:
            seed = int(tail)
        except ValueError:
            raise ValueError(f"bad random seed {tail!r} in engine spec {spec!r}") from None
        def engine(csp: Csp, box: Box, **kwargs) -> PropagationOutcome:
            return propagate_random(csp, box, seed, **kwargs)
        return engine
    raise ValueError(f"unknown propagation order {spec!r}")
