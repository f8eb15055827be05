import math

import numpy as np
import pytest

from rabiq.analysis import (
    ScanRow,
    ScanTable,
    a_of_eta,
    coeff_closed,
    critical_scan,
    delta_qc,
    experiment_estimate,
    fit_ab,
    fit_basis,
    log_grid,
    oracle_free_particle,
    oracle_harmonic,
    scan,
)
from rabiq.model import ModelKind, from_dimensionless


def test_delta_qc_decoupled_equals_oscillator_gap():
    # with g = 0 the spin parts cancel between treatments and the gap is
    # the pure oscillator value at u = beta hbar omega = 0.1
    p = from_dimensionless(100, 0.0, 0.5, beta=1.0)  # omega = 0.1
    r = delta_qc(p, 1.0)
    exact, series = oracle_harmonic(p.omega, 1.0)
    assert r.value == pytest.approx(exact, abs=1e-10)
    assert abs(r.value - series) / abs(r.value) < 1e-4


def test_delta_qc_closed_route():
    p = from_dimensionless(400, 0.5, 1.0, beta=2.0)
    closed = delta_qc(p, 2.0, method="closed")
    numeric = delta_qc(p, 2.0, method="numeric")
    assert closed.err == 0.0
    assert closed.value == pytest.approx(numeric.value, abs=5e-3)
    with pytest.raises(ValueError):
        delta_qc(from_dimensionless(25, 0.5, 0.5, beta=2.0), 2.0, method="closed")
    with pytest.raises(ValueError):
        delta_qc(p, 2.0, method="bogus")


def test_delta_qc_rabi_regression():
    # frozen after first verified run; positive, with x*delta matching the
    # magnitude seen across the normal-phase window
    p = from_dimensionless(25, 0.6, 0.5, beta=5.0)
    r = delta_qc(p, 5.0)
    assert r.value == pytest.approx(0.006088053083655787, rel=1e-8)
    assert r.value == pytest.approx(r.f_q - r.f_c, rel=0, abs=0)


def test_free_particle_oracle():
    assert oracle_free_particle(1.0, 2.0, 3.0) == 0.0
    assert oracle_free_particle(2.0, 2.0, 3.0) == 0.0
    assert oracle_free_particle(1.0, 5.0, 0.1) == 0.0
    with pytest.raises(ValueError):
        oracle_free_particle(-1.0, 1.0, 1.0)


def test_harmonic_oracle_series_remainder():
    exact, series = oracle_harmonic(0.1, 1.0)
    assert abs(exact - series) < 1e-9
    for u in np.linspace(0.01, 3.0, 25):
        exact, _ = oracle_harmonic(u, 1.0)
        assert exact > 0.0
    small = [oracle_harmonic(u, 1.0)[0] for u in (0.1, 0.01, 0.001)]
    assert small[0] > small[1] > small[2] > 0.0


def test_coeff_closed_values():
    a_lo, _ = coeff_closed(ModelKind.JC, 1.0 - 1e-9, 2.0)
    a_hi, _ = coeff_closed(ModelKind.JC, 1.0 + 1e-9, 2.0)
    assert a_lo == pytest.approx(0.5, abs=1e-8)
    assert a_hi == pytest.approx(0.5, abs=1e-8)

    a, _ = coeff_closed(ModelKind.AJC, 0.5, 2.0)
    assert a == pytest.approx(-0.125, rel=1e-14)

    _, b = coeff_closed(ModelKind.JC, 1e-12, 7.0)
    assert b == pytest.approx(7.0 / 24.0, rel=1e-9)

    a, b = coeff_closed(ModelKind.JC, 1.3, 2.0)
    assert b == 0.0 and a == pytest.approx(1 / (2 * 1.69), rel=1e-14)

    with pytest.raises(ValueError):
        coeff_closed(ModelKind.JC, 1.0, 2.0)
    with pytest.raises(ValueError):
        coeff_closed(ModelKind.RABI, 0.5, 2.0)


def _table(xs, deltas, q=0.5, eta=1.0, beta=2.0):
    rows = [ScanRow(x, q, eta, beta, 0.0, -d, d, 0.0, "spectrum-sum", "quadrature")
            for x, d in zip(xs, deltas)]
    return ScanTable(rows=tuple(rows))


def test_fit_exact_recovery():
    xs = np.array(log_grid(100, 10000, 8))
    deltas = 0.3 * xs**-0.5 + 0.1 / xs
    fit = fit_ab(_table(xs, deltas))
    assert fit.A == pytest.approx(0.3, abs=1e-10)
    assert fit.B == pytest.approx(0.1, abs=1e-10)
    assert fit.residual_rms < 1e-14


def test_fit_round_trip_with_closed_coefficients():
    a, b = coeff_closed(ModelKind.AJC, 0.7, 2.0)
    xs = np.array(log_grid(100, 10000, 12))
    fit = fit_ab(_table(xs, a * xs**-0.5 + b / xs))
    assert fit.A == pytest.approx(a, rel=1e-8)
    assert fit.B == pytest.approx(b, rel=1e-8)


def test_fit_validation():
    xs = np.array([100.0, 200.0, 400.0, 800.0])
    with pytest.raises(ValueError):
        fit_ab(_table(xs[:3], [1, 2, 3]))
    with pytest.raises(ValueError):
        fit_ab(_table([100, 150, 200, 300], [1, 2, 3, 4]))  # < one decade
    rows = (_table(xs, [1, 2, 3, 4]).rows[0],) * 4
    with pytest.raises(ValueError):
        fit_ab(ScanTable(rows=rows[:2] + _table(xs, [1, 2, 3, 4], q=0.9).rows[:2]))
    with pytest.raises(ValueError):
        fit_basis(np.array([100.0] * 4), np.zeros(4))


def test_scan_rows_and_failure_flagging():
    pts = [(25.0, 0.3, 1.0), (50.0, 0.3, 1.0)]
    table = scan(pts, beta=2.0)
    assert table.converged
    for row, (x, q, eta) in zip(table.rows, pts):
        assert (row.x, row.q, row.eta) == (x, q, eta)
        assert row.delta_qc == row.f_q - row.f_c
    # threads produce identical output in the same order
    table2 = scan(pts, beta=2.0, threads=2)
    assert [r.delta_qc for r in table2.rows] == [r.delta_qc for r in table.rows]


def test_fitted_sign_structure():
    # rotating vs anti-rotating coupling give opposite-sign leading
    # coefficients
    from rabiq.analysis import fit_at
    fit_jc = fit_at(0.5, 1.0, 2.0)
    fit_ajc = fit_at(0.5, 0.0, 2.0)
    assert fit_jc.A > 0 > fit_ajc.A
    assert fit_jc.A == pytest.approx(0.125, rel=0.02)
    assert fit_ajc.A == pytest.approx(-0.125, rel=0.02)


def test_a_of_eta_endpoints():
    pts = a_of_eta(0.5, 2.0, [0.0, 1.0])
    assert pts[0][1] == pytest.approx(-0.125, rel=0.02)
    assert pts[1][1] == pytest.approx(0.125, rel=0.02)
    with pytest.raises(ValueError):
        a_of_eta(0.5, 2.0, [0.0, 1.5])


def test_critical_scan_validation():
    with pytest.raises(ValueError):
        critical_scan(0.5, 5.0, 25.0, [0.2, 0.4, 0.8])


def test_experiment_estimate_units_and_endpoint():
    two_pi = 2 * math.pi
    omega, Omega, gc = two_pi * 4.0, two_pi * 100.0, two_pi * 20.0
    beta = 5.0 / gc
    table = experiment_estimate(omega, Omega, gc, beta, [0.0, 0.5 * gc])
    r0 = table.rows[0]
    exact, _ = oracle_harmonic(omega, beta)
    assert r0.delta_qc == pytest.approx(exact, rel=1e-8)
    assert r0.ratio == r0.delta_qc / r0.f_c
    with pytest.raises(ValueError):
        experiment_estimate(omega, Omega, gc * 1.1, beta, [0.0])
