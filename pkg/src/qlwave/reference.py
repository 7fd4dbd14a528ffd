"""Reference solutions and error measurement.

Temporal errors are measured against a reference computed with the same
spatial degree: the sinc:2 scheme run at a refined step together with a
mandatory step-halving (Richardson) consistency check, and optionally a
cross-check against an independently filtered run.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import filters as flt
from .exceptions import ConfigurationError, PreconditionError, ReferenceFailure
from .integrator import IntegratorConfig, StatePair, evolve, step, with_filter, with_tau
from .problem import ProblemSpec
from .spectral import embed, pair_norm, project, sobolev_norm


@dataclass(frozen=True)
class ReferenceConfig:
    """How much finer than the finest measured step the reference runs."""

    refine_factor: int = 64
    cross_check: bool = False
    self_check_rtol: float = 1e-4

    def __post_init__(self):
        if self.refine_factor < 2:
            raise ConfigurationError("refine_factor must be >= 2")


def _fit_degree(state: StatePair, degree: int) -> StatePair:
    if state.degree == degree:
        return state
    if state.degree > degree:
        return StatePair(project(state.u, degree), project(state.udot, degree))
    return StatePair(embed(state.u, degree), embed(state.udot, degree))


def error_h2h1(state: StatePair, ref: StatePair) -> float:
    """Error |state - ref| in the H^2 x H^1 product norm."""
    if state.degree != ref.degree:
        raise ConfigurationError(
            f"cannot compare states of degree {state.degree} and {ref.degree}"
        )
    d = state - ref
    return pair_norm(d.u, d.udot, 1.0)


def reference_solution(
    problem: ProblemSpec,
    state0: StatePair,
    T: float,
    degree: int,
    ref_cfg: ReferenceConfig,
    tau_min: float,
    base_cfg: IntegratorConfig | None = None,
) -> StatePair:
    """Validated reference state at time T with spectral degree ``degree``.

    Runs the sinc:2 scheme at tau_min/refine_factor and at half that step;
    the run pair must agree within self_check_rtol (relative to the state
    norm), otherwise a ReferenceFailure is raised.  The finer of the two
    runs is returned.  With ``cross_check`` a Grimm-Hochbruck run at the
    same step must agree within 10x the self-refinement error, otherwise
    the reference is flagged unreliable via a warning.
    """
    if T <= 0:
        raise ConfigurationError("reference horizon T must be positive")
    if tau_min <= 0:
        raise ConfigurationError("tau_min must be positive")
    state0 = _fit_degree(state0, degree)
    n_min = max(1, round(T / tau_min))
    n_ref = n_min * ref_cfg.refine_factor
    tau_ref = T / n_ref
    if base_cfg is None:
        base_cfg = IntegratorConfig(tau=tau_ref, K=degree, filter=flt.sinc_c(2.0))
    cfg = with_tau(with_filter(base_cfg, flt.sinc_c(2.0)), tau_ref)

    coarse = evolve(state0, problem, cfg, n_ref)
    fine = evolve(state0, problem, with_tau(cfg, 0.5 * tau_ref), 2 * n_ref)
    drift = error_h2h1(coarse, fine)
    scale = max(fine.norm(1.0), 1.0)
    if drift > ref_cfg.self_check_rtol * scale:
        raise ReferenceFailure(
            f"halving the reference step changed the state by {drift:.3e} "
            f"(> {ref_cfg.self_check_rtol:.1e} x |state| = {ref_cfg.self_check_rtol * scale:.3e})"
        )
    if ref_cfg.cross_check:
        other = evolve(state0, problem, with_filter(cfg, flt.grimm_hochbruck()), n_ref)
        cross = error_h2h1(coarse, other)
        if cross > 10.0 * max(drift, np.finfo(float).eps * scale):
            warnings.warn(
                f"independent filter disagrees with the reference by {cross:.3e} "
                f"(self-refinement error {drift:.3e}); reference may be unreliable",
                RuntimeWarning,
                stacklevel=2,
            )
    return fine


def _check_spectral_tail(u, rtol: float = 1e-8):
    """Require the top 10% of modes to carry < rtol of the field's norm."""
    K = u.degree
    cut = max(1, int(np.ceil(0.9 * K)))
    total = sobolev_norm(u, 0.0)
    tail_sq = float(np.sum(np.abs(u.coeffs[K + cut :]) ** 2)) * 2.0
    if np.sqrt(tail_sq) > rtol * total:
        raise PreconditionError(
            f"spectral tail (modes |j| >= {cut}) carries {np.sqrt(tail_sq):.2e} "
            f"of a norm-{total:.2e} field; the state is not resolved at degree {K}"
        )


def local_error(
    problem: ProblemSpec,
    state0: StatePair,
    tau: float,
    degree: int,
    spec: flt.FilterSpec,
    ref_cfg: ReferenceConfig | None = None,
) -> float:
    """One-step defect |phi_tau(state0) - reference(tau)| in H^2 x H^1.

    ``state0`` must be spectrally resolved (small high-mode tail), so that
    runs at different tau sample a comparable smoothness regime.
    """
    state0 = _fit_degree(state0, degree)
    _check_spectral_tail(state0.u)
    if ref_cfg is None:
        ref_cfg = ReferenceConfig(refine_factor=64)
    cfg = IntegratorConfig(tau=tau, K=degree, filter=spec)
    one = step(state0, problem, cfg)
    ref = reference_solution(problem, state0, tau, degree, ref_cfg, tau_min=tau)
    return error_h2h1(one, ref)
