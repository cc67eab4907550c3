import pytest

from cowu.core import QueryRange, SystemConfig
from cowu.errors import DomainError, InfeasibleError
from cowu.metrics import MetricInputs, evaluate
from cowu.opt import GridSpec, alpha_opt, energy_ratio, index_grid, lambda_max, sweep

Q = QueryRange(0.94, 0.98)
CFG = SystemConfig(n_pull=25, n_push=25, slots_per_frame=50)


def test_default_grid():
    g = GridSpec()
    assert len(g.alpha_values) == 21 and g.alpha_values[7] == 0.35
    assert g.lambda_values == (0.005, 0.01, 0.015, 0.02, 0.025, 0.03, 0.035, 0.04, 0.045, 0.05)
    assert g.gamma_th == 0.8


def test_index_grid_has_no_drift():
    for k, a in enumerate(index_grid(0.0, 1.0, 0.05)):
        assert a == round(k / 20, 12)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"alpha_values": (0.5, 0.2)},
        {"alpha_values": (0.0, 1.2)},
        {"lambda_values": (-0.1, 0.1)},
        {"gamma_th": 1.5},
    ],
)
def test_grid_validation(kwargs):
    with pytest.raises(DomainError):
        GridSpec(**kwargs)


def test_sweep_feasibility_definition():
    grid = GridSpec(alpha_values=(0.0, 0.3, 0.6), lambda_values=(0.01, 0.03))
    res = sweep(CFG, Q, grid)
    assert res.gamma_w.shape == (2, 3)
    for lam, a, gw, gu, e, ok in res.rows():
        r = evaluate(MetricInputs.for_alpha(CFG.replace(arrival_rate=lam), Q, a))
        assert (gw, gu, e) == (r.gamma_w, r.gamma_u, r.e_tot)
        assert ok == (gw >= 0.8 and gu >= 0.8)


def test_lambda_max_examples():
    lam, alphas = lambda_max(CFG, Q)
    assert lam == 0.025 and alphas
    assert lambda_max(CFG, None, scheme="rr") == (0.0, ())
    lam, alphas = lambda_max(CFG, Q, GridSpec(gamma_th=0.0))
    assert lam == 0.05 and len(alphas) == 21


def test_lambda_max_infeasible_everywhere():
    cfg = CFG.replace(n_push=200)
    assert lambda_max(cfg, QueryRange(0.0, 1.0)) == (0.0, ())


def test_lambda_max_rr_needs_slots():
    with pytest.raises(InfeasibleError):
        lambda_max(CFG.replace(n_pull=60), None, scheme="rr")


def test_feasibility_monotone_in_threshold():
    grid_lo = GridSpec(alpha_values=index_grid(0, 1, 0.1), lambda_values=(0.01, 0.02, 0.04), gamma_th=0.6)
    grid_hi = GridSpec(grid_lo.alpha_values, grid_lo.lambda_values, gamma_th=0.8)
    lo = sweep(CFG, Q, grid_lo).feasible
    hi = sweep(CFG, Q, grid_hi).feasible
    assert not (hi & ~lo).any()


@pytest.mark.parametrize(
    "query, lam, expected",
    [(Q, 0.005, 0.35), (Q, 0.025, 0.05), (QueryRange(0.92, 1.0), 0.015, None)],
)
def test_alpha_opt(query, lam, expected):
    choice = alpha_opt(CFG, query, lam)
    if expected is None:
        assert choice is None
    else:
        assert choice.alpha == expected
        assert choice.gamma_w >= 0.8 and choice.gamma_u >= 0.8


def test_alpha_opt_is_minimal_among_feasible():
    choice = alpha_opt(CFG, Q, 0.01)
    res = sweep(CFG, Q, lambdas=[0.01])
    feasible_e = [e for e, ok in zip(res.e_tot[0], res.feasible[0]) if ok]
    assert choice.e_tot == pytest.approx(min(feasible_e), abs=1e-15)


def test_alpha_opt_tie_prefers_smaller_alpha():
    # without pull nodes every alpha costs zero energy
    cfg = CFG.replace(n_pull=0)
    choice = alpha_opt(cfg, Q, 0.005, GridSpec(gamma_th=0.0))
    assert choice.alpha == 0.0


def test_energy_ratio():
    assert energy_ratio(CFG, Q, 0.005) == pytest.approx(0.625749132016461, rel=5e-3)
    assert energy_ratio(CFG, QueryRange(0.92, 1.0), 0.01) == pytest.approx(1.40805919935895, rel=5e-3)
    assert energy_ratio(CFG, QueryRange(0.92, 1.0), 0.015) is None
    with pytest.raises(InfeasibleError):
        energy_ratio(CFG.replace(n_pull=51), Q, 0.005)


def test_energy_ratio_identity():
    # a single certain-success pull node under a pull-only frame costs one
    # transmit slot, exactly the Round-Robin cost
    cfg = SystemConfig(n_pull=1, n_push=0, slots_per_frame=5, tx_prob=1.0)
    grid = GridSpec(alpha_values=(1.0,), lambda_values=(0.0,), gamma_th=0.5)
    assert energy_ratio(cfg, QueryRange(0.0, 1.0), 0.0, grid) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.slow
def test_sim_backend_close_to_analytic():
    grid = GridSpec(alpha_values=(0.2, 0.6), lambda_values=(0.02,))
    a = sweep(CFG, QueryRange(0.6, 0.9), grid)
    s = sweep(CFG, QueryRange(0.6, 0.9), grid, backend="sim", frames=20_000, master_seed=3)
    assert abs(a.gamma_u - s.gamma_u).max() < 0.01
    assert abs(a.gamma_w - s.gamma_w).max() < 0.02
