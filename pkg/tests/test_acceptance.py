"""Acceptance gate.  Each test records a pass/fail line printed after the run."""

import time

import numpy as np

from helpers import SX, SZ, loglog_slope, random_matrix, random_spd
from unimag.cli import simulate
from unimag.config import parse_config
from unimag.dyson import dyson_series, oracle_propagator
from unimag.grid import TimeGrid
from unimag.hamiltonians import (
    HamiltonianSpec,
    HatanoNelsonSpec,
    build_hatano_nelson,
    constant_hamiltonian,
    random_bounded_hamiltonian,
    split,
)
from unimag.linalg import adjoint, expm, fro_norm, logm, sqrtm_pd, unitarity_defect
from unimag.magnus import bch_combine, magnus_exponent, omega_density
from unimag.unitarize import (
    normalizer_exact,
    sigma_density,
    unitarize,
    unitarized_propagator_exact,
    xi_density,
)

SLOPE_TS = [0.4, 0.2, 0.1, 0.05]


def fixtures(hermitian, count=100):
    """Seeded random Hamiltonians with dim in {2, 4, 8}, norm <= 2 and window T <= 1."""
    rng = np.random.default_rng(2024)
    profiles = ("constant", "polynomial", "trigonometric")
    for i in range(count):
        dim = (2, 4, 8)[i % 3]
        T = float(rng.uniform(0.1, 1.0))
        H = random_bounded_hamiltonian(dim, 2.0, 1000 + i, profiles[i % 3], window=(0.0, T), hermitian=hermitian)
        yield H, TimeGrid(0.0, T, 64)


def test_manifest_unitarity(criterion):
    start = time.perf_counter()
    worst, used = 0.0, 0
    for H, grid in fixtures(hermitian=False):
        H.validate(grid)
        U = oracle_propagator(H, grid)
        if np.linalg.cond(U) > 1e6:
            continue
        used += 1
        worst = max(worst, unitarity_defect(unitarized_propagator_exact(U)))
    elapsed = time.perf_counter() - start
    ok = used == 100 and worst <= 1e-10 and elapsed < 10.0
    criterion(1, "manifest unitarity of P", ok, f"max defect {worst:.2e} over {used} fixtures in {elapsed:.2f}s")
    assert ok


def test_hermitian_reduction(criterion):
    worst_n = worst_p = worst_xi = 0.0
    for H, grid in fixtures(hermitian=True):
        U = oracle_propagator(H, grid)
        N = normalizer_exact(U)
        worst_n = max(worst_n, fro_norm(N - np.eye(H.dim)))
        worst_p = max(worst_p, fro_norm(N @ U - U))
        xi = xi_density(omega_density(H, grid, 1), 1)
        worst_xi = max(worst_xi, float(np.abs(xi.samples).max()))
    ok = worst_n <= 1e-10 and worst_p <= 1e-10 and worst_xi <= 1e-12
    criterion(2, "hermitian reduction", ok, f"|N-I| {worst_n:.2e}, |P-U| {worst_p:.2e}, |Xi_1| {worst_xi:.2e}")
    assert ok


def test_pure_decay(criterion):
    gamma, T = 0.7, 1.0
    H = constant_hamiltonian(-1j * gamma * np.eye(3))
    grid = TimeGrid(0.0, T, 64)
    N_ref, I = np.exp(gamma * T) * np.eye(3), np.eye(3)
    errs = {}
    for compose in ("product", "sigma"):
        r = unitarize(H, grid, compose=compose)
        errs["N exact"] = fro_norm(r.N - N_ref)
        errs["P exact"] = fro_norm(r.P_exact - I)
        errs["N series"] = fro_norm(r.N_series - N_ref)
        errs[f"P series ({compose})"] = fro_norm(r.P_series - I)
    worst = max(errs.values())
    ok = worst <= 1e-12
    criterion(3, "pure decay analytic case", ok, f"max error {worst:.2e}")
    assert ok


def test_dyson_truncation_order(criterion):
    start = time.perf_counter()
    H = random_bounded_hamiltonian(2, 2.0, 11, "trigonometric")
    Ts = [2.0**-k for k in range(3, 8)]
    oracle = [oracle_propagator(H, TimeGrid(0.0, T, 2048)) for T in Ts]
    slopes = {}
    for K in (1, 2, 3):
        errs = [fro_norm(dyson_series(H, TimeGrid(0.0, T, 512), K) - U) for T, U in zip(Ts, oracle)]
        slopes[K] = loglog_slope(Ts, errs)
    elapsed = time.perf_counter() - start
    ok = all(abs(s - (K + 1)) <= 0.3 for K, s in slopes.items()) and elapsed < 5.0
    detail = ", ".join(f"K={K}: {s:.2f}" for K, s in slopes.items())
    criterion(4, "dyson truncation order", ok, f"{detail} in {elapsed:.2f}s")
    assert ok


def test_magnus_order(criterion):
    H = HamiltonianSpec(2, lambda t: SZ + np.sin(t) * SX, 2.0)
    errs = [
        fro_norm(
            expm(-1j * magnus_exponent(omega_density(H, TimeGrid(0.0, T, 512), 2)))
            - oracle_propagator(H, TimeGrid(0.0, T, 2048), refine=True)
        )
        for T in SLOPE_TS
    ]
    slope = loglog_slope(SLOPE_TS, errs)
    ok = slope >= 2.7
    criterion(5, "magnus order 2", ok, f"slope {slope:.2f}")
    assert ok


def test_bch_oracle(criterion):
    rng = np.random.default_rng(50)
    ss = [0.2, 0.1, 0.05, 0.025]
    slopes = []
    for _ in range(50):
        A, B = random_matrix(rng, 3), random_matrix(rng, 3)
        errs = [fro_norm(bch_combine(s * A, s * B, 3) - logm(expm(s * A) @ expm(s * B))) for s in ss]
        slopes.append(loglog_slope(ss, errs))
    ok = min(slopes) >= 3.5
    criterion(6, "BCH against logm", ok, f"min slope {min(slopes):.3f} over 50 pairs")
    assert ok


def test_xi_product_identity(criterion):
    H0 = random_matrix(np.random.default_rng(7), 2)
    H = constant_hamiltonian(H0)
    errs = []
    for T in SLOPE_TS:
        xi = xi_density(omega_density(H, TimeGrid(0.0, T, 64), 2), 2)
        UUh = expm(-1j * T * H0) @ expm(1j * T * adjoint(H0))
        errs.append(fro_norm(expm(magnus_exponent(xi)) - UUh))
    slope = loglog_slope(SLOPE_TS, errs)
    ok = slope >= 3.0
    criterion(7, "xi product identity", ok, f"slope {slope:.2f}")
    assert ok


def test_path_consistency(criterion):
    cases = {"hatano-nelson": build_hatano_nelson(HatanoNelsonSpec(2, [1.0], [0.5]))}
    for seed in range(10):
        cases[f"random {seed}"] = random_bounded_hamiltonian(3, 2.0, 300 + seed, "trigonometric")
    slopes = {}
    for name, H in cases.items():
        for compose in ("product", "sigma"):
            errs = [unitarize(H, TimeGrid(0.0, T, 256), compose=compose).path_disagreement for T in SLOPE_TS]
            slopes[(name, compose)] = loglog_slope(SLOPE_TS, errs)
    worst = min(slopes.values())
    ok = worst >= 2.5
    criterion(8, "exact vs series path", ok, f"min slope {worst:.2f} over {len(slopes)} runs")
    assert ok


def _demo(method, gamma):
    g0, g1 = gamma
    return parse_config(
        {
            "model": {"hatano_nelson": {"l": 6, "tau": [1.0] * 5, "gamma": {"g0": [g0] * 5, "g1": [g1] * 5, "omega": [1.0] * 5}}},
            "time": {"t0": 0.0, "t1": 3.0, "steps": 300, "output_every": 10},
            "method": method,
            "initial_state": "site_1_localized",
        }
    )


def test_end_to_end_demo(criterion):
    exact = simulate(_demo("unitarized_exact", (0.0, 0.5)))
    norm_err = max(abs(r["state_norm"] - 1) for r in exact)

    monotone = True
    for g in (0.5, -0.5, 0.2):
        drift = [abs(r["state_norm"] - 1) for r in simulate(_demo("oracle", (g, 0.0)))]
        monotone &= all(b > a for a, b in zip(drift, drift[1:]))

    H = build_hatano_nelson(HatanoNelsonSpec(6, [1.0] * 5, [lambda t: 0.5 * np.sin(t)] * 5))
    grid = TimeGrid(0.0, 3.0, 300)
    om = omega_density(H, grid, 1)
    sigma = sigma_density(om, xi_density(om, 1), 1)
    Hc = np.stack([split(M)[0] for M in H.sample(grid.nodes)])
    sigma_err = float(np.abs(sigma.samples - Hc).max())

    ok = norm_err <= 1e-9 and monotone and sigma_err <= 1e-14
    detail = f"|norm-1| {norm_err:.2e}, oracle drift monotone {monotone}, |Sigma_1-Hc| {sigma_err:.2e}"
    criterion(9, "hatano-nelson end to end", ok, detail)
    assert ok


def test_matrix_kernels(criterion):
    rng = np.random.default_rng(10)
    sq = max(fro_norm((lambda S: S @ S)(sqrtm_pd(A)) - A) for A in (random_spd(rng, 4) for _ in range(100)))

    ex = 0.0
    for _ in range(50):
        A = random_matrix(rng, 4, 3.0)
        w, V = np.linalg.eig(A)
        ref = V @ np.diag(np.exp(w)) @ np.linalg.inv(V)
        ex = max(ex, fro_norm(expm(A) - ref) / max(1.0, fro_norm(ref)))

    dual = 0.0
    for _ in range(50):
        U = random_matrix(rng, 4) + np.eye(4)
        a = normalizer_exact(U, via="root")
        dual = max(dual, fro_norm(a - normalizer_exact(U, via="inverse")) / fro_norm(a))

    ok = sq <= 1e-10 and ex <= 1e-9 and dual <= 1e-9
    criterion(10, "matrix kernels", ok, f"sqrtm {sq:.2e}, expm {ex:.2e}, dual normalizer {dual:.2e}")
    assert ok
