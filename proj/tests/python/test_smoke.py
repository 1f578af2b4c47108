import math

import pytest

import stochfrac as sf


def test_version():
    assert sf.__version__ == "0.1.0"


def test_d_lambda_half_is_two_over_pi():
    assert sf.d_lambda(0.5) == pytest.approx(2.0 / math.pi, rel=1e-12)
    with pytest.raises(ValueError):
        sf.d_lambda(1.5)


def test_weight_table_and_row_sum():
    # G_0 = d_{1/2} (2 + 2 ln 2), independent of dx at lambda = 1/2.
    g0 = sf.fractional_weight(0.5, 0.1, 0)
    assert g0 == pytest.approx((2.0 / math.pi) * (2.0 + 2.0 * math.log(2.0)), rel=1e-12)

    table = sf.weight_table(0.3, 0.0625, 200)
    assert len(table) == 201
    assert table[0] > 0.0
    assert all(w < 0.0 for w in table[1:])
    total = table[0] + 2.0 * sum(table[1:]) + 2.0 * sf.weight_tail_sum(0.3, 0.0625, 201)
    assert abs(total) < 1e-12


def test_weight_matches_quadrature():
    closed = sf.fractional_weight(0.65, 0.125, 3)
    quad = sf.weight_quadrature(0.65, 0.125, 3, 1e-12)
    assert quad == pytest.approx(closed, rel=1e-8)


def test_fluxes():
    assert sf.clipped_burgers_flux(0.5) == 0.125
    assert sf.clipped_burgers_flux(3.0) == 0.5
    assert sf.clipped_sigma(0.5) == 0.25
    assert sf.clipped_sigma(-1.0) == 0.0
    assert sf.godunov_flux(1.0, -1.0, clipped=False) == pytest.approx(0.5)
    assert sf.godunov_flux(0.0, 1.0, clipped=False) == pytest.approx(0.0)


def test_projection_and_norms():
    grid = sf.Grid1D(0.0625, 16)
    u = sf.project_initial(lambda x: 1.0 if abs(x) < 0.5 else 0.0, grid,
                           quad_order=5, breakpoints=[-0.5, 0.5])
    assert u.mass() == pytest.approx(1.0, rel=1e-12)
    assert sf.bv_seminorm(u) == pytest.approx(2.0, rel=1e-12)
    coarse = sf.coarsen(u, 2)
    assert coarse.mass() == pytest.approx(1.0, rel=1e-12)


def test_brownian_reproducibility():
    a = sf.brownian_increments(42, 7, 64, 2.0 ** -12)
    b = sf.brownian_increments(42, 7, 64, 2.0 ** -12)
    c = sf.brownian_increments(42, 8, 64, 2.0 ** -12)
    assert a == b
    assert a != c


def test_solve_smoke():
    snaps = sf.solve(lam=0.5, dx=2.0 ** -4, dt=2.0 ** -6, t_end=0.25, k_cells=16,
                     snapshots=[0.25], noise_on=True, seed=3)
    u = snaps[0.25]
    assert len(u) == 33
    assert all(math.isfinite(v) for v in u.values)
    again = sf.solve(lam=0.5, dx=2.0 ** -4, dt=2.0 ** -6, t_end=0.25, k_cells=16,
                     snapshots=[0.25], noise_on=True, seed=3)
    assert u.values == again[0.25].values


def test_micro_rate_study_deterministic():
    kwargs = dict(lam=0.5, n_paths=4, seed=11, half_width=1.0, t_end=0.5,
                  dt_ref=2.0 ** -7, dx_ref=2.0 ** -5,
                  levels=[(2.0 ** -5, 2.0 ** -3), (2.0 ** -4, 2.0 ** -2)])
    r1 = sf.run_error_study(**kwargs)
    r2 = sf.run_error_study(threads=3, **kwargs)
    assert r1.n_aborted == 0
    assert [row.error for row in r1.rows] == [row.error for row in r2.rows]
    assert r1.rows[0].rate is None
    assert r1.rows[1].rate is not None
    assert r1.csv() == r2.csv()


def test_estimate_rate():
    rates = sf.estimate_rate([1.0, 2.0, 4.0], [0.25, 0.5, 1.0])
    assert rates == pytest.approx([1.0, 1.0])
    with pytest.raises(ValueError):
        sf.estimate_rate([1.0, -1.0], [0.5, 1.0])
