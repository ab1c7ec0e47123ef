"""Acceptance checks run by ``nhbrach verify`` and by the test-suite.

Every check compares a closed form against an independent numerical route
(ODE integration, quadrature, finite differences) at a fixed tolerance and
returns a :class:`Check`.
"""
import time
from typing import NamedTuple

import numpy as np

from .bloch import UP, TargetSpec, bloch_from_spinors, spinors_from_target
from .brachistochrone import (
    ConstraintMode,
    cell_centers,
    classify_saddle,
    evolution_time,
    landscape,
    reality_manifold_tau,
)
from .dynamics import (
    integrate_bloch,
    integrate_spinor,
    first_arrival,
    propagate_closed,
    propagate_spinor,
)
from .hamiltonian import HamiltonianParams, optimal_hamiltonian
from .hyperboloid import (
    PTScenario,
    check_on_hyperboloid,
    closed_form_length,
    final_bloch,
    geodesic_residual,
    mapped_path,
    omega_constrained_bounds,
    path_length,
    pt_evolution_time,
    schrodinger_curve,
)
from .io import landscape_rows, rows_to_csv

SEED = 20240607

# reference landscape parameter sets (constraint mode, chi)
FIGURE_CASES = {
    "fig1-left": (ConstraintMode.omega_fixed(1.0), np.pi),
    "fig1-right": (ConstraintMode.omega_fixed(1 + 0.25j), np.pi + 0.25j),
    "fig2-left": (ConstraintMode.abs_omega_fixed(1 + 0.1j), np.pi + 1j),
    "fig2-right": (ConstraintMode.abs_omega_fixed(1 + 5j), np.pi),
    "fig3-left": (ConstraintMode.variance_fixed(1.0), np.pi / 2),
    "fig3-right": (ConstraintMode.variance_fixed(1.0), np.pi / 2 + 0.25j),
}


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _random_params(rng):
    omega = rng.uniform(0.1, 5) * np.exp(1j * rng.uniform(-np.pi, np.pi))
    theta = complex(rng.uniform(0.05, np.pi - 0.05), rng.uniform(-2, 2))
    phi = complex(rng.uniform(-np.pi, np.pi), rng.uniform(-1, 1))
    lambda0 = complex(rng.normal(), 0.2 * rng.normal())
    return HamiltonianParams(lambda0, omega, theta, phi)


def closed_form_vs_ode(n_draws=500, seed=SEED, tol=1e-8):
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst_ode = worst_spin = 0.0
    for _ in range(n_draws):
        p = _random_params(rng)
        t = rng.uniform(0, 2 * np.pi / abs(p.omega))
        closed = propagate_closed(p, t)
        ode = integrate_bloch(p, t, tol=1e-13, n_samples=2).final
        spin = bloch_from_spinors(propagate_spinor(p, t, UP))
        worst_ode = max(worst_ode, np.max(np.abs(closed - ode)))
        worst_spin = max(worst_spin, np.max(np.abs(spin - closed)), np.max(np.abs(spin - ode)))
    elapsed = time.perf_counter() - start
    passed = worst_ode <= tol and worst_spin <= tol and elapsed < 10.0
    return Check(
        "1 closed form / ODE / spinor equivalence",
        passed,
        f"max|closed-ode|={worst_ode:.2e}, max|spinor-other|={worst_spin:.2e}, "
        f"{n_draws} draws in {elapsed:.2f}s (limit 1e-8, 10s)",
    )


def saddle_value():
    mode = ConstraintMode.omega_fixed(1.0)
    target = TargetSpec(np.pi)
    res = evolution_time(mode, np.pi / 2, target)
    err = abs(res.tau - np.pi)
    hess = classify_saddle(mode, target, h=1e-5)
    base = res.tau
    real_min = all(
        evolution_time(mode, np.pi / 2 + d, target).tau > base
        for d in (-1e-3, -1e-5, 1e-5, 1e-3)
    )
    passed = err <= 1e-12 and hess.is_saddle and hess.is_real_minimum and real_min
    return Check(
        "2 saddle value and classification",
        passed,
        f"|tau-pi|={err:.1e}, d2/dRe={hess.d2_re:.3g}, d2/dIm={hess.d2_im:.3g}, "
        f"local minimum on Im theta=0: {real_min}",
    )


def arbitrarily_small_time():
    mode = ConstraintMode.omega_fixed(1.0)
    target = TargetSpec(np.pi)
    ys = np.linspace(0, 4, 100)
    tau, resid = reality_manifold_tau(mode, target, ys)
    decreasing = bool(np.all(np.diff(tau) < 0))
    on_manifold = float(np.max(np.abs(resid)))
    passed = tau[-1] < 0.08 and decreasing and on_manifold <= 1e-9
    return Check(
        "3 arbitrarily small time",
        passed,
        f"tau(Im theta=4)={tau[-1]:.5f} (<0.08), strictly decreasing: {decreasing}, "
        f"max|arg Psi|={on_manifold:.1e}",
    )


def pt_time_formula():
    worst = 0.0
    details = []
    below = True
    for eta in (0.5, 1.0, 2.0):
        sc = PTScenario(1.0, eta, np.pi)
        tau = pt_evolution_time(sc)
        hit = first_arrival(sc.params, final_bloch(sc), t_max=2 * np.pi, match_tol=1e-6)
        err = np.inf if hit is None else abs(hit - tau)
        worst = max(worst, err)
        below &= tau < np.pi
        details.append(f"eta={eta}: {tau:.9f}")
    tau0 = pt_evolution_time(PTScenario(1.0, 0.0, np.pi))
    passed = worst <= 1e-6 and below and abs(tau0 - np.pi) <= 1e-12
    return Check(
        "4 real-spectrum time formula",
        passed,
        f"max|t_ode - tau|={worst:.1e}; " + ", ".join(details) + f"; tau(eta=0)={tau0:.15f}",
    )


def hyperboloid_invariants():
    worst = 0.0
    for eta in (0.0, 0.5, 1.0, 2.0):
        for chi in (np.pi / 2, np.pi):
            sc = PTScenario(1.0, eta, chi)
            path = mapped_path(sc, t_end=2 * np.pi, n_samples=512)
            worst = max(worst, check_on_hyperboloid(path.points, tol=1e-8))
    residuals = {}
    for eta in (0.0, 1.0):
        sc = PTScenario(1.0, eta, np.pi)
        length = pt_evolution_time(sc) * sc.speed
        s = np.linspace(0, length, 512)
        residuals[eta] = geodesic_residual(schrodinger_curve(sc), s, h=1e-4)
    passed = worst <= 1e-8 and residuals[0.0] < 1e-6 and residuals[1.0] > 1e-3
    return Check(
        "5 hyperboloid invariants",
        passed,
        f"max|g(m,m)-1|={worst:.1e}, geodesic residual eta=0: {residuals[0.0]:.1e}, "
        f"eta=1: {residuals[1.0]:.3g}",
    )


def length_bounds():
    worst = 0.0
    inside = True
    for chi in (np.pi / 2, np.pi):
        for eta in (0.0, 0.5, 1.0, 3.0):
            sc = PTScenario(1.0, eta, chi)
            quad = path_length(mapped_path(sc, n_samples=4096))
            worst = max(worst, abs(quad - closed_form_length(chi, eta)))
            inside &= 2 * np.sin(chi / 2) - 1e-9 < quad <= chi + 1e-9
    passed = worst <= 1e-6 and inside
    return Check(
        "6 path length and bounds",
        passed,
        f"max|quadrature-closed|={worst:.1e}, all in (2 sin(chi/2), chi]: {inside}",
    )


def omega_bounds():
    w, chi = 1.0, np.pi
    omegas = np.linspace(0.01, 1.0, 100)
    out = np.array([omega_constrained_bounds(w, chi, om) for om in omegas])
    tau, length = out[:, 0], out[:, 1]
    lo, hi = 2 / w * np.sin(chi / 2), chi / w
    in_tau = bool(np.all((tau >= lo - 1e-10) & (tau <= hi + 1e-10)))
    in_len = bool(np.all((length >= 2 * np.sin(chi / 2) - 1e-10) & (length <= chi + 1e-10)))
    monotone = bool(np.all(np.diff(tau) > 0))
    tau_ep = omega_constrained_bounds(w, chi, 1e-7)[0]
    tau_herm = omega_constrained_bounds(w, chi, w)[0]
    ends = abs(tau_ep - 2.0) <= 1e-6 and abs(tau_herm - np.pi) <= 1e-6
    passed = in_tau and in_len and monotone and ends
    return Check(
        "7 omega-constrained bounds",
        passed,
        f"tau in [2, pi]: {in_tau}, L in [2, pi]: {in_len}, increasing: {monotone}, "
        f"tau(Omega->0)={tau_ep:.9f}, tau(Omega=omega)={tau_herm:.9f}",
    )


def optimal_round_trip(n_targets=100, seed=SEED):
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for _ in range(n_targets):
        alpha = rng.uniform(-0.5, 0.5)
        omega = rng.uniform(0.5, 3.0) * np.exp(1j * alpha)
        chi = rng.uniform(0.3, 3.0) * np.exp(1j * alpha)
        gamma = complex(rng.uniform(-np.pi, np.pi), rng.uniform(-0.5, 0.5))
        lambda0 = complex(rng.normal(), 0.2 * rng.normal())
        target = TargetSpec(chi, gamma)
        h = optimal_hamiltonian(UP, spinors_from_target(target), omega, lambda0)
        tau = abs(chi / omega)
        _, pairs = integrate_spinor(h, tau, UP, tol=1e-13)
        n = bloch_from_spinors(pairs[-1])
        worst = max(worst, np.max(np.abs(n - target.bloch)))
    herm = 0.0
    for _ in range(20):
        target = TargetSpec(rng.uniform(0.2, 3.0), rng.uniform(-np.pi, np.pi))
        h = optimal_hamiltonian(UP, spinors_from_target(target), rng.uniform(0.5, 3), rng.normal())
        herm = max(herm, np.max(np.abs(h - h.conj().T)))
    passed = worst <= 1e-8 and herm <= 1e-12
    return Check(
        "8 optimal Hamiltonian round trip",
        passed,
        f"max|n(tau)-n_f|={worst:.1e} over {n_targets} targets, "
        f"max|H-H^dagger| (Hermitian case)={herm:.1e}",
    )


def figure_csv(name, n=200):
    mode, chi = FIGURE_CASES[name]
    grid = landscape(mode, TargetSpec(chi), cell_centers(0, np.pi, n), cell_centers(-3, 3, n))
    return grid, rows_to_csv(landscape_rows(grid))


def figure_regression(n=200):
    problems = []
    for name in FIGURE_CASES:
        grid, first = figure_csv(name, n)
        _, second = figure_csv(name, n)
        if first != second:
            problems.append(f"{name}: not byte-identical")
        ok = ~grid.branch
        if np.any(np.isnan(grid.abs_psi[ok])) or np.any(np.isnan(grid.arg_psi[ok])):
            problems.append(f"{name}: NaN outside flagged cells")
        if first.count("\n") != n * n + 1:
            problems.append(f"{name}: grid not rectangular")
    # real data: |Psi| even and arg Psi odd under Im theta -> -Im theta
    grid, _ = figure_csv("fig1-left", n)
    ok = ~(grid.branch | grid.branch[:, ::-1])
    sym = np.max(np.abs(grid.abs_psi - grid.abs_psi[:, ::-1])[ok])
    if sym > 1e-9 * np.nanmax(grid.abs_psi):
        problems.append(f"fig1-left: conjugation symmetry broken ({sym:.1e})")
    return Check(
        "9 figure-data regression",
        not problems,
        "; ".join(problems) if problems else f"{len(FIGURE_CASES)} grids of {n}x{n}, reproducible, finite",
    )


CHECKS = (
    closed_form_vs_ode,
    saddle_value,
    arbitrarily_small_time,
    pt_time_formula,
    hyperboloid_invariants,
    length_bounds,
    omega_bounds,
    optimal_round_trip,
    figure_regression,
)


def run_all(echo=print):
    """Run every acceptance check, echoing one line per check."""
    results = []
    for check in CHECKS:
        try:
            result = check()
        except Exception as exc:  # a crash is a failed check, not an abort
            result = Check(check.__name__, False, f"raised {type(exc).__name__}: {exc}")
        if echo is not None:
            echo(result.line())
        results.append(result)
    return results
