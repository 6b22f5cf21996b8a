"""Fixpoint engines: scheduling, termination, traces, and confluence."""

import pytest

from boxprune import (
    Box,
    Constraint,
    Interval,
    PropagationOutcome,
    Status,
    apply_lifted,
    big_gamma,
    compile_problem,
    empty_box,
    gamma_power,
    get_engine,
    propagate_random,
    propagate_roundrobin,
    propagate_worklist,
)

from helpers import (
    X_STAR,
    X_STAR_DOWN,
    Y_STAR,
    left_half_box,
    make_csp,
    quartic_csp_xyzu,
    right_half_box,
)

ENGINES = [
    ("roundrobin", propagate_roundrobin),
    ("worklist", propagate_worklist),
    ("random:42", lambda csp, box, **kw: propagate_random(csp, box, 42, **kw)),
]

PLATEAU = Box(
    {
        "x": Interval(0.0, 1.0),
        "y": Interval(0.0, 1.0),
        "z": Interval(0.0, 1.0),
        "u": Interval(1.0, 1.0),
    }
)


@pytest.mark.parametrize("name,engine", ENGINES)
def test_initial_quartic_box_contracts_to_plateau(name, engine):
    csp = quartic_csp_xyzu()
    out = engine(csp, csp.initial_box)
    assert out.fixpoint == PLATEAU
    assert out.status is Status.FEASIBLE_UNKNOWN
    assert out.effective_steps == 2  # const on u, then the sum pulling z down
    assert out.effective_steps <= out.steps


def test_roundrobin_step_count_is_two_sweeps():
    csp = quartic_csp_xyzu()
    out = propagate_roundrobin(csp, csp.initial_box)
    assert out.steps == 8


@pytest.mark.parametrize("name,engine", ENGINES)
def test_plateau_is_a_fixpoint(name, engine):
    csp = quartic_csp_xyzu()
    out = engine(csp, PLATEAU)
    assert out.fixpoint == PLATEAU
    assert out.effective_steps == 0


def test_restarting_roundrobin_costs_one_sweep():
    csp = quartic_csp_xyzu()
    out = propagate_roundrobin(csp, PLATEAU)
    assert out.steps == len(csp.constraints)


@pytest.mark.parametrize("name,engine", ENGINES)
def test_no_constraints_means_no_steps(name, engine):
    csp = make_csp([], {"x": Interval(0.0, 1.0)})
    box = Box({"x": Interval(0.25, 0.75)})
    out = engine(csp, box)
    assert out == PropagationOutcome(box, Status.FEASIBLE_UNKNOWN, 0, 0, None)


@pytest.mark.parametrize("name,engine", ENGINES)
def test_empty_input_box_is_returned_untouched(name, engine):
    csp = quartic_csp_xyzu()
    box = empty_box(("x", "y", "z", "u"))
    out = engine(csp, box, record_trace=True)
    assert out.status is Status.PROVED_EMPTY
    assert out.steps == 0
    assert out.trace == ()


@pytest.mark.parametrize("name,engine", ENGINES)
def test_scope_mismatch_raises(name, engine):
    csp = quartic_csp_xyzu()
    with pytest.raises(ValueError, match="missing \\['u'\\]"):
        engine(csp, Box({"x": Interval(0, 1), "y": Interval(0, 1), "z": Interval(0, 1)}))
    bigger = csp.initial_box.cylinder(frozenset(csp.variables) | {"w"})
    with pytest.raises(ValueError, match="extra \\['w'\\]"):
        engine(csp, bigger)


@pytest.mark.parametrize("name,engine", ENGINES)
def test_left_half_is_proved_empty(name, engine):
    csp = quartic_csp_xyzu()
    out = engine(csp, left_half_box())
    assert out.status is Status.PROVED_EMPTY
    assert out.fixpoint.is_empty
    assert out.fixpoint == empty_box(("u", "x", "y", "z"))
    assert out.effective_steps >= 1


def test_right_half_contracts_to_a_sliver():
    csp = quartic_csp_xyzu()
    out = propagate_worklist(csp, right_half_box())
    assert out.status is Status.FEASIBLE_UNKNOWN
    x = out.fixpoint["x"]
    y = out.fixpoint["y"]
    z = out.fixpoint["z"]
    assert x.width <= 1e-12
    assert x.contains(X_STAR) and x.contains(X_STAR_DOWN)
    assert y.contains(Y_STAR)
    assert y.width <= 1e-12
    assert z.width <= 1e-12
    assert z.is_subset(Interval(0.38, 0.3825))
    assert out.fixpoint["u"] == Interval(1.0, 1.0)


def test_trace_is_off_by_default():
    csp = quartic_csp_xyzu()
    out = propagate_worklist(csp, csp.initial_box)
    assert out.trace is None


@pytest.mark.parametrize("name,engine", ENGINES)
def test_trace_records_every_application(name, engine):
    csp = quartic_csp_xyzu()
    out = engine(csp, csp.initial_box, record_trace=True)
    assert out.trace is not None and len(out.trace) == out.steps
    assert sum(1 for r in out.trace if r.changed) == out.effective_steps
    for record in out.trace:
        con = csp.constraints[record.cid]
        assert record.kind == con.kind
        assert record.before.scope == frozenset(con.variables)
        assert con.cid == record.cid


def test_roundrobin_trace_starts_in_id_order():
    csp = quartic_csp_xyzu()
    out = propagate_roundrobin(csp, csp.initial_box, record_trace=True)
    assert [r.cid for r in out.trace[:4]] == [0, 1, 2, 3]


@pytest.mark.parametrize("name,engine", ENGINES)
def test_fixpoint_certificate(name, engine):
    """Every contractor leaves the reported fixpoint alone."""
    csp = quartic_csp_xyzu()
    for start in (csp.initial_box, right_half_box()):
        out = engine(csp, start)
        assert out.status is Status.FEASIBLE_UNKNOWN
        for con in csp.constraints:
            assert apply_lifted(con, out.fixpoint) == out.fixpoint


@pytest.mark.parametrize("name,engine", ENGINES)
def test_status_reflects_emptiness(name, engine):
    csp = quartic_csp_xyzu()
    for start in (csp.initial_box, left_half_box(), right_half_box()):
        out = engine(csp, start)
        assert (out.status is Status.PROVED_EMPTY) == out.fixpoint.is_empty


def test_budget_overrun_raises_runtime_error():
    csp = quartic_csp_xyzu()
    with pytest.raises(RuntimeError, match="exceeded"):
        propagate_roundrobin(csp, csp.initial_box, max_rounds=1)
    with pytest.raises(RuntimeError, match="exceeded"):
        propagate_worklist(csp, csp.initial_box, max_steps=3)
    with pytest.raises(RuntimeError, match="exceeded"):
        propagate_random(csp, csp.initial_box, 7, max_steps=3)


# The simultaneous one-round operator.


def test_gamma_power_zero_is_identity():
    csp = quartic_csp_xyzu()
    box = right_half_box()
    assert gamma_power(csp, box, 0) == box


def test_gamma_power_one_matches_single_round():
    cons = [Constraint("sum", ("x", "y", "z"), cid=0)]
    csp = make_csp(cons, {"x": Interval(0, 2), "y": Interval(0, 2), "z": Interval(3, 5)})
    box = csp.initial_box
    assert gamma_power(csp, box, 1) == big_gamma(csp, box)
    assert gamma_power(csp, box, 1) == Box({"x": Interval(1, 2), "y": Interval(1, 2), "z": Interval(3, 4)})


def test_gamma_powers_descend_and_enclose_the_fixpoint():
    csp = quartic_csp_xyzu()
    fixpoint = propagate_worklist(csp, right_half_box()).fixpoint
    current = right_half_box()
    for _ in range(20):
        nxt = gamma_power(csp, current, 1)
        assert current.encloses(nxt)
        assert nxt.encloses(fixpoint)
        current = nxt


# Confluence: all schedules land on the same box.


CONFLUENCE_PROBLEMS = [
    "var x in [0, 1]; var y in [0, 1]; constraint y = x^2; constraint x^2 + y^2 = 1;",
    "var x in [-2, 2]; constraint x^4 + x^2 = 1;",
    "var a in [-2, 2]; var b in [-2, 2]; constraint a*b - b = 2; constraint b = a^2;",
    "var p in [0, 4]; var q in [-4, 0]; constraint p + q = 1;",
]


@pytest.mark.parametrize("text", CONFLUENCE_PROBLEMS)
def test_engines_agree_bit_for_bit(text):
    csp = compile_problem(text)
    outs = [
        propagate_roundrobin(csp, csp.initial_box),
        propagate_worklist(csp, csp.initial_box),
        propagate_random(csp, csp.initial_box, 0),
        propagate_random(csp, csp.initial_box, 1),
        propagate_random(csp, csp.initial_box, 17),
    ]
    for out in outs[1:]:
        assert out.fixpoint == outs[0].fixpoint
        assert out.status is outs[0].status


def test_engines_agree_on_proved_empty():
    csp = quartic_csp_xyzu()
    boxes = [
        propagate_roundrobin(csp, left_half_box()).fixpoint,
        propagate_worklist(csp, left_half_box()).fixpoint,
        propagate_random(csp, left_half_box(), 5).fixpoint,
    ]
    assert boxes[0] == boxes[1] == boxes[2]
    assert boxes[0].is_empty


# Engine lookup.


def test_get_engine_names():
    csp = quartic_csp_xyzu()
    for spec, direct in (("roundrobin", propagate_roundrobin), ("worklist", propagate_worklist)):
        assert get_engine(spec) is direct
    seeded = get_engine("random:17")
    assert seeded(csp, csp.initial_box) == propagate_random(csp, csp.initial_box, 17)


def test_get_engine_rejects_bad_specs():
    with pytest.raises(ValueError, match="bad random seed"):
        get_engine("random:x")
    with pytest.raises(ValueError, match="bad random seed"):
        get_engine("random:")
    with pytest.raises(ValueError, match="unknown propagation order"):
        get_engine("alphabetical")
