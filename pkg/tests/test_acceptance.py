"""Acceptance suite: every exit criterion as its own test (bundled
criteria are split so an individual miss is visible in isolation).

Each test prints

    [acceptance] <tag>: PASS|FAIL - <measured vs required>

before asserting, so `pytest -s tests/test_acceptance.py` produces the
full scorecard in one run.
"""

import math
import time

import numpy as np
import pytest

from rabiq.analysis import (
    a_of_eta,
    coeff_closed,
    critical_scan,
    experiment_estimate,
    fit_at,
    log_grid,
    oracle_free_particle,
    oracle_harmonic,
)
from rabiq.cli import main as cli_main
from rabiq.model import ModelKind, Phase, from_dimensionless
from rabiq.spectra import (
    SymmetricMatrix,
    ajc_levels,
    jc_levels,
    rabi_spectrum,
    sym_eigenvalues,
)
from rabiq.thermo_classical import fc_closed, fc_numeric
from rabiq.thermo_quantum import fq_closed, partition_sum


def report(tag: str, ok: bool, detail: str) -> None:
    print(f"[acceptance] {tag}: {'PASS' if ok else 'FAIL'} - {detail}")


def _log2cosh(y: float) -> float:
    y = abs(y)
    return y + math.log1p(math.exp(-2.0 * y))


def _log2sinh(y: float) -> float:
    return y + math.log1p(-math.exp(-2.0 * y))


# --------------------------------------------------------------------------
# 1. harmonic-oscillator oracle
def test_c01_harmonic_oracle():
    t0 = time.perf_counter()
    doubles = {u: oracle_harmonic(u, 1.0) for u in (0.01, 0.05, 0.1)}
    runtime = time.perf_counter() - t0

    from mpmath import mp, mpf, log, sinh
    mp.dps = 50
    worst_ratio, worst_double = 0.0, 0.0
    for u_str in ("0.01", "0.05", "0.1"):
        u = mpf(u_str)
        exact = log(2 * sinh(u / 2) / u)
        series = u**2 / 24 - u**4 / 2880
        bound = u**6 / 181440
        worst_ratio = max(worst_ratio, float(abs(exact - series) / bound))
        worst_double = max(worst_double, abs(doubles[float(u_str)][0] - float(exact)))
    ok = worst_ratio <= 1.0 and runtime < 1e-3 and worst_double < 1e-12
    report("C1", ok, f"|exact-series|/bound max {worst_ratio:.3f} (<=1), "
                     f"runtime {1e3 * runtime:.3f} ms (<1), double dev {worst_double:.1e}")
    assert worst_ratio <= 1.0
    assert runtime < 1e-3
    assert worst_double < 1e-12


# --------------------------------------------------------------------------
# 2. free-particle oracle
def test_c02_free_particle():
    vals = [oracle_free_particle(b, m, v)
            for b in (0.1, 1.0, 10.0) for m in (0.5, 2.0) for v in (1.0, 7.0)]
    ok = all(v == 0.0 for v in vals)
    report("C2", ok, f"all {len(vals)} gaps exactly 0")
    assert ok


# --------------------------------------------------------------------------
# 3. decoupled limit against closed forms
def test_c03_decoupled_limit():
    t0 = time.perf_counter()
    worst_q = worst_c = 0.0
    for x in (25.0, 400.0):
        for beta in (2.0, 5.0):
            p = from_dimensionless(x, 0.0, 0.5, beta=beta)
            w, om = p.omega, p.Omega
            spec = rabi_spectrum(p, beta, 1e-10)
            f_q = partition_sum(spec, beta).value + w / 2.0
            f_q_exact = (_log2sinh(beta * w / 2) - _log2cosh(beta * om / 2)) / beta
            f_c = fc_numeric(p, beta, 1e-10).value
            f_c_exact = -(_log2cosh(beta * om / 2) - math.log(beta * w)) / beta
            worst_q = max(worst_q, abs(f_q - f_q_exact))
            worst_c = max(worst_c, abs(f_c - f_c_exact))
    runtime = time.perf_counter() - t0
    ok = worst_q < 1e-8 and worst_c < 1e-8 and runtime < 10.0
    report("C3", ok, f"max |F_Q dev| {worst_q:.2e}, max |F_C dev| {worst_c:.2e} "
                     f"(<1e-8), runtime {runtime:.1f}s (<10)")
    assert worst_q < 1e-8 and worst_c < 1e-8
    assert runtime < 10.0


# --------------------------------------------------------------------------
# 4. Table I vs printed-formula sums and quadrature at x = 1e4, beta = 2
def test_c04_table1_consistency():
    t0 = time.perf_counter()
    x, beta, n_max = 1e4, 2.0, 20000
    rows = []
    for q in (0.3, 0.5, 1.2, 1.5):
        phase = Phase.NORMAL if q < 1 else Phase.SUPERRADIANT
        for kind, eta in ((ModelKind.JC, 1.0), (ModelKind.AJC, 0.0)):
            p = from_dimensionless(x, q, eta, beta=beta)
            levels = (jc_levels(p, n_max) if kind is ModelKind.JC
                      else ajc_levels(p, n_max))
            f_sum = partition_sum(levels, beta).value
            cell = fq_closed(kind, phase, x, q, beta).value
            tol = 0.01 * abs(cell + math.sqrt(x) / 2.0)
            rows.append((f"{kind.value} q={q}", abs(f_sum - cell), tol))
        pc = from_dimensionless(x, q, 1.0, beta=beta)
        f_c = fc_numeric(pc, beta, 1e-10).value
        cell_c = fc_closed(phase, x, q, beta).value
        tol_c = 0.01 * abs(cell_c + math.sqrt(x) / 2.0)
        rows.append((f"classical q={q}", abs(f_c - cell_c), tol_c))
    runtime = time.perf_counter() - t0
    ok = all(dev <= tol for _, dev, tol in rows) and runtime < 60.0
    detail = "; ".join(f"{n} dev {d:.2e}/tol {t:.2e}" for n, d, t in rows)
    report("C4", ok, detail + f"; runtime {runtime:.1f}s (<60)")
    for name, dev, tol in rows:
        assert dev <= tol, f"{name}: {dev:.3e} > {tol:.3e}"
    assert runtime < 60.0


# --------------------------------------------------------------------------
# 5. Eq. 5/6 coefficient recovery on the pinned grid
@pytest.fixture(scope="module")
def c5_fits():
    t0 = time.perf_counter()
    fits = {}
    for kind, eta in ((ModelKind.JC, 1.0), (ModelKind.AJC, 0.0)):
        for q in (0.3, 0.7, 1.2, 1.5):
            fits[(kind, q)] = fit_at(q, eta, 2.0, x_grid=log_grid(100, 10000, 8))
    fits["elapsed"] = time.perf_counter() - t0
    return fits


@pytest.mark.parametrize("kind", [ModelKind.JC, ModelKind.AJC])
@pytest.mark.parametrize("q", [0.3, 0.7])
def test_c05_A_recovery(c5_fits, kind, q):
    fit = c5_fits[(kind, q)]
    a_ref, _ = coeff_closed(kind, q, 2.0)
    rel = abs(fit.A - a_ref) / abs(a_ref)
    ok = rel <= 0.02
    report(f"C5-A {kind.value} q={q}", ok,
           f"A_fit {fit.A:+.6f} vs closed {a_ref:+.6f}, rel {100 * rel:.2f}% (<=2%)")
    assert ok, f"A recovery {100 * rel:.2f}% exceeds 2%"


@pytest.mark.parametrize("kind", [ModelKind.JC, ModelKind.AJC])
@pytest.mark.parametrize("q", [0.3, 0.7])
def test_c05_B_recovery(c5_fits, kind, q):
    fit = c5_fits[(kind, q)]
    _, b_ref = coeff_closed(kind, q, 2.0)
    rel = abs(fit.B - b_ref) / abs(b_ref)
    ok = rel <= 0.05
    report(f"C5-B {kind.value} q={q}", ok,
           f"B_fit {fit.B:+.6f} vs closed {b_ref:+.6f}, rel {100 * rel:.2f}% (<=5%)")
    assert ok, f"B recovery {100 * rel:.2f}% exceeds 5%"


@pytest.mark.parametrize("kind", [ModelKind.JC, ModelKind.AJC])
@pytest.mark.parametrize("q", [1.2, 1.5])
def test_c05_B_vanishes_superradiant(c5_fits, kind, q):
    fit = c5_fits[(kind, q)]
    bound = 0.05 * 2.0 / 24.0  # 5% of the q = 0 reference beta gc^2 / 24
    ok = abs(fit.B) < bound
    report(f"C5-Bsr {kind.value} q={q}", ok,
           f"|B_fit| {abs(fit.B):.4f} vs bound {bound:.4f}")
    assert ok, f"|B| = {abs(fit.B):.4f} not below {bound:.4f}"


def test_c05_runtime(c5_fits):
    ok = c5_fits["elapsed"] < 120.0
    report("C5-runtime", ok, f"{c5_fits['elapsed']:.0f}s (<120)")
    assert ok


# --------------------------------------------------------------------------
# 6. Rabi A-cancellation from the full numeric pipeline
@pytest.fixture(scope="module")
def c6_fits():
    t0 = time.perf_counter()
    fits = {q: fit_at(q, 0.5, 5.0, x_grid=log_grid(25, 400, 8)) for q in (0.6, 1.2)}
    fits["elapsed"] = time.perf_counter() - t0
    return fits


@pytest.mark.parametrize("q", [0.6, 1.2])
def test_c06_rabi_A_cancellation(c6_fits, q):
    fit = c6_fits[q]
    bound = max(1e-3, 3.0 * fit.residual_rms * math.sqrt(400.0))
    ok = abs(fit.A) <= bound
    report(f"C6 q={q}", ok,
           f"|A_fit| {abs(fit.A):.2e} vs bound {bound:.2e} (rms {fit.residual_rms:.1e})")
    assert ok, f"|A| = {abs(fit.A):.3e} exceeds {bound:.3e}"


def test_c06_runtime(c6_fits):
    ok = c6_fits["elapsed"] < 600.0
    report("C6-runtime", ok, f"{c6_fits['elapsed']:.0f}s (<600)")
    assert ok


# --------------------------------------------------------------------------
# 7. mixing-fraction linearity of A
def test_c07_a_of_eta_linearity():
    t0 = time.perf_counter()
    pts = a_of_eta(0.6, 20.0, [0.0, 0.25, 0.5, 0.75, 1.0])
    runtime = time.perf_counter() - t0
    a0, a1 = pts[0][1], pts[-1][1]
    tol = 0.05 * abs(a1)
    devs = [(eta, abs(a - (a0 * (1 - eta) + a1 * eta))) for eta, a in pts]
    worst = max(d for _, d in devs)
    ok = worst < tol and runtime < 900.0
    report("C7", ok, f"max |A - line| {worst:.2e} vs tol {tol:.2e}; "
                     f"endpoints {a0:+.4f}/{a1:+.4f}; runtime {runtime:.0f}s (<900)")
    assert worst < tol
    assert runtime < 900.0


# --------------------------------------------------------------------------
# 8. behavior across the critical point (property-based)
@pytest.fixture(scope="module")
def c8_scans():
    t0 = time.perf_counter()
    qs = [round(0.2 + 0.1 * i, 10) for i in range(13)]
    scans = {eta: critical_scan(eta, 5.0, 25.0, qs) for eta in (1.0, 0.0, 0.5)}
    scans["qs"] = qs
    scans["elapsed"] = time.perf_counter() - t0
    return scans


def test_c08_exactly_solvable_models_enhance(c8_scans):
    # The gap grows in magnitude through q = 1 for both pure-coupling
    # models.  Its sign follows the coupling type (positive rotating,
    # negative anti-rotating, matching the closed A coefficients), so
    # "increasing through the transition" reads as increasing |gap| once
    # signs are accounted for: the signed gap increases for eta = 1 and
    # decreases for eta = 0.
    qs = c8_scans["qs"]
    upto = [q for q in qs if q <= 1.1000001]  # through the critical point
    jc = [r.delta_qc for r in c8_scans[1.0].rows][: len(upto)]
    ajc = [r.delta_qc for r in c8_scans[0.0].rows][: len(upto)]
    jc_ok = all(b > a for a, b in zip(jc, jc[1:]))
    ajc_ok = all(b < a for a, b in zip(ajc, ajc[1:]))
    runtime_ok = c8_scans["elapsed"] < 600.0
    ok = jc_ok and ajc_ok and runtime_ok
    report("C8-jc/ajc", ok,
           f"jc increasing {jc_ok}, ajc decreasing (mirror) {ajc_ok}, "
           f"runtime {c8_scans['elapsed']:.0f}s (<600)")
    assert jc_ok and ajc_ok
    assert runtime_ok


def test_c08_rabi_suppressed_near_critical(c8_scans):
    qs = c8_scans["qs"]
    vals = {q: r.delta_qc for q, r in zip(qs, c8_scans[0.5].rows)}
    window = [vals[q] for q in qs if 0.8 <= q <= 1.2]
    ok = min(window) < vals[0.6]
    report("C8-rabi", ok,
           f"min gap on q in [0.8,1.2] {min(window):.5f} < gap(0.6) {vals[0.6]:.5f}")
    assert ok


# --------------------------------------------------------------------------
# 9. trapped-ion estimate
def test_c09_experiment_estimate():
    t0 = time.perf_counter()
    two_pi = 2 * math.pi
    gc = two_pi * 20.0
    beta = 5.0 / gc
    grid = list(np.linspace(0.0, 1.4 * gc, 15))
    t25 = experiment_estimate(two_pi * 4.0, two_pi * 100.0, gc, beta, grid)
    r25 = max(abs(r.ratio) for r in t25.rows)
    t100 = experiment_estimate(gc / 10.0, gc * 10.0, gc, beta, grid)
    r100 = max(abs(r.ratio) for r in t100.rows)
    factor = r25 / r100
    runtime = time.perf_counter() - t0
    ok = 0.003 <= r25 <= 0.03 and 5.0 <= factor <= 12.0 and runtime < 600.0
    report("C9", ok, f"max ratio {100 * r25:.3f}% (in [0.3,3]%), "
                     f"x=100 reduction {factor:.2f} (in [5,12]), "
                     f"runtime {runtime:.0f}s (<600)")
    assert 0.003 <= r25 <= 0.03
    assert 5.0 <= factor <= 12.0
    assert runtime < 600.0


# --------------------------------------------------------------------------
# 10. eigensolver battery
def test_c10_eigensolver_battery():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20260810)
    sizes = np.concatenate([
        rng.integers(2, 97, 150),
        rng.integers(97, 257, 40),
        rng.integers(257, 512, 9),
        [512],
    ])
    assert sizes.size == 200
    worst_tr = worst_fro = 0.0
    for n in sizes:
        a = rng.standard_normal((int(n), int(n)))
        a = (a + a.T) / 2.0
        # residual bound ||Hv - wv|| <= 1e-10 ||H|| enforced internally
        w = sym_eigenvalues(SymmetricMatrix(int(n), a), tol=1e-10)
        tr_scale = max(np.abs(w).sum(), 1e-300)
        worst_tr = max(worst_tr, abs(w.sum() - np.trace(a)) / tr_scale)
        fro = np.linalg.norm(a, "fro") ** 2
        worst_fro = max(worst_fro, abs((w**2).sum() - fro) / fro)
    runtime = time.perf_counter() - t0
    ok = worst_tr < 1e-10 and worst_fro < 1e-10 and runtime < 120.0
    report("C10", ok, f"trace dev {worst_tr:.2e}, frobenius dev {worst_fro:.2e} "
                      f"(<1e-10), residuals certified, runtime {runtime:.0f}s (<120)")
    assert worst_tr < 1e-10 and worst_fro < 1e-10
    assert runtime < 120.0


# --------------------------------------------------------------------------
# 11. byte-identical figure datasets
def test_c11_determinism(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert cli_main(["--out", str(out_a), "--no-plot", "figure", "--id", "2a"]) == 0
    assert cli_main(["--out", str(out_b), "--no-plot", "figure", "--id", "2a"]) == 0
    same = (out_a / "figure_2a.csv").read_bytes() == (out_b / "figure_2a.csv").read_bytes()
    report("C11", same, "figure 2a CSVs byte-identical across runs")
    assert same
