"""Modified-energy diagnostics.

The error measure behind the integrator's stability is

    E(e, edot, u) = |(e, edot)|_1^2 + kappa * U(Phi e, Phi u)

with the non-quadratic correction

    U(e, u) = <cos(tau*Om) e'', a(u) e''>_0
              - tau^2/4 * kappa * |Psi1(a(u) e'')|_1^2.

This module evaluates E and U (in a projected, fully discrete variant
and in an unprojected variant), the operator

    L(u) = kappa*Phi a(u) cos(tau*Om) Phi
           - kappa^2/4 * Phi a(u) sin^2(tau*Om) Phi^2 a(u) Phi

whose quadratic form represents kappa*U, a randomized positivity check
of 1 + L, and the step-to-step energy-change identity for problems with
g == 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import filters as flt
from .exceptions import ConfigurationError, PreconditionError
from .integrator import IntegratorConfig, StatePair, step
from .problem import ProblemSpec, ellipticity_report
from .spectral import (
    SpectralField,
    coeffs_from_samples,
    dealiased_product,
    derivative,
    inner_product,
    omega_weights,
    pair_norm,
    project,
    sobolev_norm,
    synthesize_values,
)


@dataclass(frozen=True)
class EnergyReport:
    """Values of the modified energy and its pieces for one state."""

    pair_norm_sq: float
    U_value: float
    E_value: float
    positivity_margin: Optional[float] = None
    identity_residual: Optional[float] = None


def _a_field(u: SpectralField, problem: ProblemSpec, degree: int) -> SpectralField:
    """Trigonometric-interpolant representation of a(u) at the given degree."""
    vals = np.asarray(problem.a(synthesize_values(u.coeffs, 2 * degree + 1)), dtype=float)
    return SpectralField(coeffs_from_samples(vals, degree))


def apply_position_filter(f: SpectralField, cfg: IntegratorConfig) -> SpectralField:
    """Apply the position filter phi(tau*Om) as a Fourier multiplier."""
    w = omega_weights(f.degree)
    return SpectralField(f.coeffs * np.asarray(flt.phi(cfg.filter, cfg.tau * w)))


def _psi1_mult(f: SpectralField, cfg: IntegratorConfig) -> SpectralField:
    w = omega_weights(f.degree)
    return SpectralField(f.coeffs * np.asarray(flt.psi1(cfg.filter, cfg.tau * w)))


def _cos_mult(f: SpectralField, cfg: IntegratorConfig) -> SpectralField:
    w = omega_weights(f.degree)
    return SpectralField(f.coeffs * np.cos(cfg.tau * w))


def u_term(
    e: SpectralField,
    u: SpectralField,
    problem: ProblemSpec,
    cfg: IntegratorConfig,
    projected: bool = True,
    a_degree: Optional[int] = None,
) -> float:
    """The non-quadratic energy correction U(e, u).

    With ``projected`` (the fully discrete default) the inner product
    a(u)*e'' is truncated back to degree K inside both terms.  Without it
    the exact degree-(K + a_degree) product is kept, which is the variant
    represented exactly by the operator L; ``a_degree`` sets the
    interpolation degree of a(u) (default: the working degree K).
    """
    if e.degree != u.degree:
        raise ConfigurationError("e and u must have equal degrees")
    K = e.degree
    a_rep = _a_field(u, problem, a_degree if a_degree is not None else K)
    exx = derivative(e, 2)
    w = dealiased_product(a_rep, exx)
    if projected:
        w = project(w, K)
    term1 = inner_product(_cos_mult(exx, cfg), w, s=0.0)
    term2 = sobolev_norm(_psi1_mult(w, cfg), 1.0) ** 2
    return term1 - 0.25 * cfg.tau**2 * problem.kappa * term2


def modified_energy(
    e: SpectralField,
    edot: SpectralField,
    u: SpectralField,
    problem: ProblemSpec,
    cfg: IntegratorConfig,
    projected: bool = True,
) -> EnergyReport:
    """Modified energy E = |(e, edot)|_1^2 + kappa*U(Phi e, Phi u)."""
    pn_sq = pair_norm(e, edot, 1.0) ** 2
    uval = u_term(
        apply_position_filter(e, cfg),
        apply_position_filter(u, cfg),
        problem,
        cfg,
        projected=projected,
    )
    return EnergyReport(
        pair_norm_sq=pn_sq,
        U_value=uval,
        E_value=pn_sq + problem.kappa * uval,
    )


def energy_report(
    e: SpectralField,
    edot: SpectralField,
    u: SpectralField,
    problem: ProblemSpec,
    cfg: IntegratorConfig,
    n_probes: int = 100,
    rng: Optional[np.random.Generator] = None,
) -> EnergyReport:
    """Complete energy report for one (error, snapshot) pair.

    On top of the energy values this fills the worst Rayleigh positivity
    margin of 1 + L(Phi u) over ``n_probes`` random plus all single-mode
    probes, and the relative residual of the identity tying the
    unprojected energy correction to the operator quadratic form at
    (e, u).
    """
    base = modified_energy(e, edot, u, problem, cfg)
    margin = positivity_check(u, problem, cfg, n_samples=n_probes, rng=rng)
    ef = apply_position_filter(e, cfg)
    uf = apply_position_filter(u, cfg)
    lhs = problem.kappa * u_term(ef, uf, problem, cfg, projected=False)
    exx = derivative(e, 2)
    rhs = inner_product(apply_l_operator(uf, exx, problem, cfg), exx, s=0.0)
    return EnergyReport(
        pair_norm_sq=base.pair_norm_sq,
        U_value=base.U_value,
        E_value=base.E_value,
        positivity_margin=margin,
        identity_residual=abs(lhs - rhs) / (1.0 + abs(lhs)),
    )


def apply_l_operator(
    u: SpectralField,
    v: SpectralField,
    problem: ProblemSpec,
    cfg: IntegratorConfig,
    a_degree: Optional[int] = None,
) -> SpectralField:
    """Apply L(u) to v; the result is truncated to the degree of v.

    All pointwise multiplications by a(u) are exact convolutions, so modes
    up to deg(v) of the result are exact and <L(u) v, v>_0 equals
    kappa*U(v_int, u) with v = v_int'' for the unprojected U variant.
    """
    tau, kappa = cfg.tau, problem.kappa
    if kappa == 0.0:
        return SpectralField(np.zeros(2 * v.degree + 1, dtype=np.complex128))
    a_rep = _a_field(u, problem, a_degree if a_degree is not None else u.degree)

    def phi_mult(f):
        return apply_position_filter(f, cfg)

    def sin2phi2(f):
        w = omega_weights(f.degree)
        m = np.sin(tau * w) ** 2 * np.asarray(flt.phi(cfg.filter, tau * w)) ** 2
        return SpectralField(f.coeffs * m)

    t1 = phi_mult(v)
    branch_a = phi_mult(dealiased_product(a_rep, _cos_mult(t1, cfg)))
    branch_b = phi_mult(dealiased_product(a_rep, sin2phi2(dealiased_product(a_rep, t1))))
    out = kappa * branch_a - 0.25 * kappa * kappa * branch_b
    return project(out, v.degree)


def positivity_check(
    u: SpectralField,
    problem: ProblemSpec,
    cfg: IntegratorConfig,
    n_samples: int = 1000,
    delta: Optional[float] = None,
    a0: Optional[float] = None,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Worst sampled Rayleigh margin of 1 + L(Phi u) against delta/8.

    Samples (|v|_0^2 + <L(Phi u) v, v>_0) / |v|_0^2 - delta/8 over
    ``n_samples`` random real fields plus the deterministic single-mode
    probes cos(jx), sin(jx) for all |j| <= K; a non-negative result
    certifies the sampled lower bound.  ``delta``/``a0`` default to the
    ellipticity estimates of the supplied snapshot; explicitly supplied
    values are checked against those estimates first.
    """
    rep = ellipticity_report(problem, u)
    if delta is None:
        if rep.delta_est <= 0.0:
            raise PreconditionError(
                f"hyperbolicity lost: min 1 + kappa*a(u) = {rep.delta_est:.3e} <= 0"
            )
        delta = rep.delta_est
        a0 = rep.A0_est
    else:
        if a0 is None:
            raise ConfigurationError("a0 must be supplied together with delta")
        if rep.delta_est < 0.5 * delta:
            raise PreconditionError(
                f"min 1 + kappa*a(u) = {rep.delta_est:.3e} < delta/2 = {0.5 * delta:.3e}"
            )
        if rep.A0_est > a0 + 0.5 * delta:
            raise PreconditionError(
                f"max kappa*a(u) = {rep.A0_est:.3e} > A0 + delta/2 = {a0 + 0.5 * delta:.3e}"
            )

    margins = [m for _, m in positivity_probes(u, problem, cfg, n_samples, delta, rng)]
    return float(min(margins))


def positivity_probes(
    u: SpectralField,
    problem: ProblemSpec,
    cfg: IntegratorConfig,
    n_samples: int,
    delta: float,
    rng: Optional[np.random.Generator] = None,
):
    """Yield (probe label, Rayleigh margin) pairs; see positivity_check."""
    if rng is None:
        rng = np.random.default_rng(0)
    K = u.degree
    uf = apply_position_filter(u, cfg)

    def margin(v: SpectralField) -> float:
        n0 = sobolev_norm(v, 0.0) ** 2
        quad = inner_product(apply_l_operator(uf, v, problem, cfg), v, s=0.0)
        return (n0 + quad) / n0 - delta / 8.0

    yield "mode-cos-0", margin(SpectralField.from_dict(K, {0: 1.0}))
    for j in range(1, K + 1):
        yield f"mode-cos-{j}", margin(SpectralField.from_dict(K, {j: 0.5}))
        yield f"mode-sin-{j}", margin(SpectralField.from_dict(K, {j: -0.5j}))
    for i in range(n_samples):
        re = rng.standard_normal(2 * K + 1)
        im = rng.standard_normal(2 * K + 1)
        c = re + 1j * im
        c = 0.5 * (c + np.conj(c[::-1]))
        v = SpectralField(c)
        scale = sobolev_norm(v, 0.0)
        yield f"random-{i:04d}", margin(SpectralField(c / scale))


def _g_terms(up: SpectralField, vp: SpectralField, problem: ProblemSpec,
             cfg: IntegratorConfig) -> float:
    """R*(u, v): the quadratic-vs-incremental correction at one time level.

    Both arguments are position-filtered states.  A = PK(aK(u) (u-v)''),
    B = PK((aK(u) - aK(v)) v''); the value is

        <cos e, A>_0 + <cos e, B>_1
        + tau^2 kappa/2 <Psi1 A, Psi1 B>_1 + tau^2 kappa/4 |Psi1 B|_1^2.
    """
    K = up.degree
    e = up - vp
    a_u = _a_field(up, problem, K)
    a_v = _a_field(vp, problem, K)
    A = project(dealiased_product(a_u, derivative(e, 2)), K)
    B = project(dealiased_product(a_u - a_v, derivative(vp, 2)), K)
    ce = _cos_mult(e, cfg)
    psiA = _psi1_mult(A, cfg)
    psiB = _psi1_mult(B, cfg)
    return (
        inner_product(ce, A, s=0.0)
        + inner_product(ce, B, s=1.0)
        + 0.5 * cfg.tau**2 * problem.kappa * inner_product(psiA, psiB, s=1.0)
        + 0.25 * cfg.tau**2 * problem.kappa * sobolev_norm(psiB, 1.0) ** 2
    )


def _pk_nonlinearity(x: SpectralField, problem: ProblemSpec) -> SpectralField:
    """Degree-K truncation of the interpolated quasilinear term aK(x)*x''."""
    K = x.degree
    a_rep = _a_field(x, problem, K)
    return project(dealiased_product(a_rep, derivative(x, 2)), K)


def energy_change_residual(
    un: StatePair,
    vn: StatePair,
    problem: ProblemSpec,
    cfg: IntegratorConfig,
) -> float:
    """Residual of the one-step energy-change identity along two solutions.

    Requires g == 0.  Advances both states one step, evaluates the
    modified energy of their difference before and after, and compares the
    change against the explicit remainder formula; returns
    |LHS - RHS| / (1 + |LHS|), which is at roundoff level when the
    integrator and the energy algebra are consistent.
    """
    if problem.g is not None:
        raise ConfigurationError("the energy-change identity requires a problem with g == 0")
    kappa = problem.kappa
    up, vp = step(un, problem, cfg), step(vn, problem, cfg)

    e_new = modified_energy((up - vp).u, (up - vp).udot, up.u, problem, cfg).E_value
    e_old = modified_energy((un - vn).u, (un - vn).udot, un.u, problem, cfg).E_value

    fu0 = apply_position_filter(un.u, cfg)
    fv0 = apply_position_filter(vn.u, cfg)
    fu1 = apply_position_filter(up.u, cfg)
    fv1 = apply_position_filter(vp.u, cfg)

    dG0 = _pk_nonlinearity(fu0, problem) - _pk_nonlinearity(fv0, problem)
    dG1 = _pk_nonlinearity(fu1, problem) - _pk_nonlinearity(fv1, problem)
    r_tilde = inner_product(fu1 - fv1, dG0, s=1.0) - inner_product(fu0 - fv0, dG1, s=1.0)
    r_star = _g_terms(fu1, fv1, problem, cfg) - _g_terms(fu0, fv0, problem, cfg)

    lhs = e_new
    rhs = e_old + kappa * (r_tilde + r_star)
    return abs(lhs - rhs) / (1.0 + abs(lhs))
