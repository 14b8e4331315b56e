"""Parameter schedules: frozen resolutions, recursion parity, stop rules."""

import math
from dataclasses import replace

import pytest

from oracles import schedule_stop, schedule_terms
from tightpack.schedule import (
    DIGRAPH_DRIFT,
    HYPER_DRIFT,
    Schedule,
    digraph_schedule,
    hyper_schedule,
)


def test_digraph_frozen():
    s = digraph_schedule(8, 0.5, 0.5)
    assert s.kind == "digraph"
    assert s.T == 98329
    assert s.p_stop == 0.05731275270029195
    assert s.eps_prev == 428.302184646368
    assert s.p_prev == 0.08694766684514031
    assert s.eps_final == 2026.5514756558027
    assert s.p_final == 0.010244764737517512
    assert s.eps_bound == 4766.617021552963
    assert s.eps_bound_ok


def test_hyper_frozen():
    s = hyper_schedule(8, 0.5, 0.5)
    assert s.kind == "3graph"
    assert s.T == 630105
    assert s.p_stop == 0.23871040097760413
    assert s.eps_prev == 65.1651178989445
    assert s.p_prev == 0.23892143543173178
    assert s.eps_final == 66.04341768261536
    assert s.p_final == 0.23843352649800886
    assert s.eps_bound == 65.79928490598824
    assert s.eps_bound_ok


def test_terms_match_oracle():
    s = digraph_schedule(8, 0.5, 0.5)
    eps, ps = s.terms(6)
    assert eps.tolist() == [
        0.5,
        0.5000025427500095,
        0.5000050855388128,
        0.5000076283664107,
        0.5000101712328041,
        0.5000127141379943,
    ]
    assert ps.tolist() == [
        0.5,
        0.4999993988770663,
        0.49999879774874123,
        0.49999819661502476,
        0.4999975954759167,
        0.4999969943314171,
    ]
    oeps, ops = schedule_terms(0.5, 0.5, DIGRAPH_DRIFT, s.denom, 6)
    assert eps.tolist() == oeps
    assert ps.tolist() == ops


def test_terms_reach_stored_endpoint():
    # Replaying the recursion T+1 terms deep lands exactly on the stored
    # final pair, so the lazy terms() route and the scan agree bit for bit.
    s = digraph_schedule(8, 0.9, 0.5)
    eps, ps = s.terms(s.T + 1)
    assert (eps[-1], ps[-1]) == (s.eps_final, s.p_final)
    assert (eps[-2], ps[-2]) == (s.eps_prev, s.p_prev)


def test_stop_rule_matches_oracle():
    s = hyper_schedule(8, 0.5, 0.5)
    T, eps_prev, p_prev, eps_fin, p_fin = schedule_stop(
        0.5, 0.5, HYPER_DRIFT, s.denom, s.p_stop
    )
    assert T == s.T
    assert (eps_prev, p_prev) == (s.eps_prev, s.p_prev)
    assert (eps_fin, p_fin) == (s.eps_final, s.p_final)


def test_monotone_and_stop_bracket():
    for s in (digraph_schedule(32, 0.3, 0.8), hyper_schedule(16, 0.4, 0.6)):
        eps, ps = s.terms(min(s.T, 500) + 1)
        assert all(a < b for a, b in zip(eps, eps[1:]))
        assert all(a > b for a, b in zip(ps, ps[1:]))
        assert s.p_final <= s.p_stop < s.p_prev
        assert s.eps_prev < s.eps_final


def test_stop_factor_values():
    s = digraph_schedule(8, 0.5, 0.5)
    assert s.p_stop == (1 / 8) * 0.5 ** (1 / 8) * 0.5
    h = hyper_schedule(8, 0.5, 0.5)
    assert h.p_stop == (1 / 2) * 0.5 ** (1 / 15) * 0.5


def test_denominator_scaling():
    s = digraph_schedule(8, 0.5, 0.5)
    assert s.denom == 1e5 * math.log(8)
    h = hyper_schedule(8, 0.5, 0.5)
    assert h.denom == 1e6 * math.log(8)


def test_kappa_and_r():
    s = digraph_schedule(100, 0.5, 0.5)
    e = 0.25
    assert s.kappa(e) == s.denom / (e * e)
    assert s.r(e, 0.4) == 2.0 * s.kappa(e) / 0.4
    h = hyper_schedule(100, 0.5, 0.5)
    assert h.r(e, 0.4) == h.kappa(e) * 100 / (3.0 * 0.4)


def test_eps_bound_formula():
    s = digraph_schedule(8, 0.5, 0.5)
    expect = 0.5 * (1.0 / ((1 / 8) * 0.5 ** (1 / 8))) ** DIGRAPH_DRIFT
    assert math.isclose(s.eps_bound, expect, rel_tol=1e-12)
    bad = replace(s, eps_prev=s.eps_bound * 2)
    assert not bad.eps_bound_ok


def test_one_step_reference_values():
    # One recursion step at eps = 0.1 with ln n = 10 denominators; these are
    # the worked micro-examples for both schedule kinds.
    d = Schedule(
        kind="digraph", n=0, eps0=0.1, p0=0.5, drift=DIGRAPH_DRIFT, denom=1e6,
        p_stop=0.0, T=0, eps_prev=float("nan"), p_prev=float("nan"),
        eps_final=0.1, p_final=0.5, eps_bound=float("inf"),
    )
    eps1, p1 = d._step(0.1, 0.5)
    assert round(eps1, 11) == 0.10000000423
    assert round(p1, 9) == 0.499999995
    h = replace(d, kind="3graph", drift=HYPER_DRIFT, denom=1e7)
    heps1, _ = h._step(0.1, 0.5)
    assert round(heps1, 11) == 0.10000000066


def test_validation():
    with pytest.raises(ValueError):
        digraph_schedule(1, 0.5, 0.5)
    with pytest.raises(ValueError):
        digraph_schedule(8, 0.0, 0.5)
    with pytest.raises(ValueError):
        digraph_schedule(8, 1.0, 0.5)
    with pytest.raises(ValueError):
        hyper_schedule(8, 0.5, 0.0)
    with pytest.raises(ValueError):
        hyper_schedule(8, 0.5, 1.0)


def test_to_dict_keys():
    d = digraph_schedule(8, 0.5, 0.5).to_dict()
    assert sorted(d) == [
        "T",
        "eps0",
        "eps_bound",
        "eps_bound_ok",
        "eps_final",
        "eps_prev",
        "kind",
        "n",
        "p0",
        "p_final",
        "p_prev",
        "p_stop",
    ]
