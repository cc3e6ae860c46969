import functools
import warnings

import numpy as np
import pytest
from hypothesis import strategies as st

from etformation import graph as gr
from etformation.engine import RigidityWarning, run
from etformation.scenarios import scenario_sphere, scenario_v_formation

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@functools.lru_cache(maxsize=None)
def v_run(topology, dynamics="unicycle", trigger="event", hold="own", **kw):
    cfg = scenario_v_formation(topology, dynamics=dynamics, trigger=trigger, **kw)
    cfg.hold = hold
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RigidityWarning)
        return run(cfg)


@functools.lru_cache(maxsize=None)
def sphere_run(trigger="event"):
    return run(scenario_sphere(trigger=trigger))


@st.composite
def connected_graphs(draw, min_n=2, max_n=8):
    n = draw(st.integers(min_n, max_n))
    order = draw(st.permutations(range(n)))
    edges = set()
    for k in range(1, n):
        parent = order[draw(st.integers(0, k - 1))]
        a, b = order[k], parent
        edges.add((min(a, b), max(a, b)))
    extra = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in edges]
    if extra:
        edges |= set(draw(st.lists(st.sampled_from(extra), unique=True, max_size=len(extra))))
    return gr.from_edges(n, sorted(edges))


def random_positions(rng, n, dim, scale=1.0):
    return scale * rng.standard_normal((n, dim))


@pytest.fixture
def triangle():
    return gr.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def tri_pos():
    return np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def trace_invariant_violations(trace, hold="own"):
    """Triggered agents have e_i = 0 after broadcasting; with own-trigger hold a
    control only changes at that agent's trigger steps. Needs record_stride 1."""
    bad = []
    fired = trace.condition[:-1] != 0
    if np.any(trace.e_norm[:-1][fired] != 0.0):
        bad.append("nonzero e after trigger")
    if hold == "own":
        changed = np.any(trace.controls[1:-1] != trace.controls[:-2], axis=2)
        if np.any(changed & ~fired[1:]):
            bad.append("control changed without a trigger")
    for ev in trace.events:
        if ev.condition in ("1", "2") and not ev.lhs >= ev.threshold:
            bad.append(f"event below threshold: {ev}")
            break
    return bad
