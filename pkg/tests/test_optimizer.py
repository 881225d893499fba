import numpy as np
import pytest

from hsr_alloc.capacity import g1, g2
from hsr_alloc.optimizer import (
    Infeasible, beta_lattice, bounds_and_gap, constraint_curve, cpsa, cpsa_anchor, grid_lipschitz,
    grid_oracle, opsa, solve_eta,
)
from hsr_alloc.study import Study
from hsr_alloc.validation import with_rho


def test_beta_lattice():
    b = beta_lattice(1e-3)
    assert b.size == 1001 and b[0] == 0.0 and b[-1] == 1.0
    with pytest.raises(ValueError):
        beta_lattice(0.3)


def test_solve_eta_boundaries(study):
    f = study.factors[0]
    assert solve_eta(0.3, f, 0.0) == 1.0
    assert solve_eta(0.2, f, float(g2(0.0, 0.2, f))) == 0.0
    with pytest.raises(Infeasible):
        solve_eta(0.0, f, 1.01 * study.target.c_sum)


def test_solve_eta_self_consistent(study):
    f = study.factors[0]
    r = study.target.r_th
    tol = 1e-6 * study.target.c_sum
    eta = solve_eta(0.0, f, r)
    assert 0.0 < eta < 1.0
    v = g2(eta, 0.0, f)
    assert r <= v <= r + tol


def test_curve_is_shared_across_periods(study):
    # user statistics do not depend on the period
    c0 = constraint_curve(study.factors[0], study.target.r_th, 1e-2)
    c1 = constraint_curve(study.factors[60], study.target.r_th, 1e-2)
    assert np.array_equal(c0.etas, c1.etas, equal_nan=True)
    assert np.array_equal(c0.feasible, c1.feasible)


def test_extreme_targets(cfg):
    st0 = Study(with_rho(cfg, 0.0))
    for a in st0.sweep():
        assert (a.beta, a.eta) == (1.0, 1.0)
    pos = 49 + 10
    assert st0.sweep()[pos].c_mr == g1(1.0, 1.0, st0.factors[pos])
    g = grid_oracle(st0.trajectory.periods[pos], st0.factors[pos], 0.0, 1e-2)
    assert (g.beta, g.eta) == (1.0, 1.0)

    st1 = Study(with_rho(cfg, 1.0))
    for a in st1.sweep():
        assert a.beta == 0.0 and a.eta == 0.0 and a.c_mr == 0.0


@pytest.mark.parametrize("i", [0, 24, 49])
def test_opsa_near_grid_rho_half(study, i):
    pos = i + 49
    per, f = study.trajectory.periods[pos], study.factors[pos]
    a = opsa(per, f, study.target.r_th, study.params, True, study.curve)
    g = grid_oracle(per, f, study.target.r_th, 1e-3)
    assert abs(a.c_mr - g.c_mr) <= 1e-3 * g.c_mr
    assert a.c_users >= study.target.r_th - study.curve.tol


def test_opsa_feasible_and_on_constraint(study):
    for a in study.sweep():
        assert a.feasible
        assert a.c_users == pytest.approx(study.target.r_th, rel=2e-6)


def test_grid_refinement_bounded_by_lipschitz(study):
    pos = 49 + 30
    per, f = study.trajectory.periods[pos], study.factors[pos]
    coarse = grid_oracle(per, f, study.target.r_th, 0.02)
    fine = grid_oracle(per, f, study.target.r_th, 0.01)
    assert fine.c_mr >= coarse.c_mr - grid_lipschitz(f, 0.02)


def test_grid_resolution_domain(study):
    with pytest.raises(ValueError):
        grid_oracle(study.trajectory.periods[0], study.factors[0], study.target.r_th, 0.5)


def test_cpsa_anchor_and_dominance(study):
    opt = study.column(study.sweep(), "c_mr")
    for v in ("PL", "BL", "I"):
        rows = study.cpsa(v)
        c = study.column(rows, "c_mr")
        pos = cpsa_anchor(v, study.trajectory) + 49
        assert c[pos] == opt[pos]
        assert np.all(opt >= c - 1e-6 * opt)
        assert all(r.feasible for r in rows)


def test_cpsa_pl_poor_at_centre(study):
    opt = study.sweep()[49].c_mr
    pl = study.cpsa("PL")[49].c_mr
    assert pl < 0.9 * opt


def test_cpsa_unknown_variant(study):
    with pytest.raises(ValueError):
        cpsa("X", study.trajectory, study.factors, study.target.r_th, study.params)


def test_gap_properties(study):
    gaps = study.gaps()
    assert gaps[49].gap == 0.0
    vals = np.array([g.gap for g in gaps])
    assert np.array_equal(vals, vals[::-1])
    assert np.all((vals >= 0) & (vals < 1))
    assert 0 < gaps[-1].gap < 1
    assert len(np.unique(np.round(vals, 12))) > 10


def test_gap_single_period(study):
    pos = 49 + 49
    r = bounds_and_gap(study.trajectory.periods[pos], study.factors[pos], study.target.r_th,
                       study.params)
    assert r.c_upper >= r.c_lower > 0


def test_infeasible_target(cfg):
    from dataclasses import replace

    st = Study(replace(cfg, rate_target=2 * Study(cfg).target.c_sum))
    with pytest.raises(Infeasible):
        st.sweep()
