"""Fully discrete trigonometric integrator.

One step of the scheme for u_tt = -Omega^2 u + kappa*f(u), with
Omega = sqrt(1 - d^2/dx^2) acting as multiplication by w_j = sqrt(j^2+1):

    u'  = cos(tau*Om) u + tau*sinc(tau*Om) ud + tau^2/2 sinc(tau*Om) kappa*F(u)
    ud' = -Om*sin(tau*Om) u + cos(tau*Om) ud
          + tau/2 cos(tau*Om) kappa*F(u) + tau/2 kappa*F(u')

where F is the filtered, degree-K-truncated nonlinearity.  The filtered
nonlinearity applies the position filter, evaluates a and g by
trigonometric interpolation on 2K+1 nodes, forms the quasilinear product
exactly in degree 2K (no aliasing), applies the force filter, and
truncates back to degree K.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
import scipy.fft

from . import filters as flt
from .exceptions import ConfigurationError, DivergenceError, NormGuardError
from .problem import ProblemSpec
from .spectral import (
    SpectralField,
    coeffs_from_samples,
    omega_weights,
    pair_norm,
    synthesize_values,
)


@dataclass(frozen=True)
class StatePair:
    """Position/velocity pair (u, udot) of equal-degree real fields."""

    u: SpectralField
    udot: SpectralField

    def __post_init__(self):
        if self.u.degree != self.udot.degree:
            raise ConfigurationError(
                f"state degrees differ: {self.u.degree} vs {self.udot.degree}"
            )

    @property
    def degree(self) -> int:
        return self.u.degree

    def __sub__(self, other: "StatePair") -> "StatePair":
        return StatePair(self.u - other.u, self.udot - other.udot)

    def norm(self, s: float = 1.0) -> float:
        return pair_norm(self.u, self.udot, s)

    def negated_velocity(self) -> "StatePair":
        return StatePair(self.u, -self.udot)


@dataclass(frozen=True)
class IntegratorConfig:
    """Time step, spectral degree, filter and guards for one run."""

    tau: float
    K: int
    filter: flt.FilterSpec
    dealias_nodes: int = 0  # 0 means the minimal exact grid 4K+1
    max_norm: float = 1e6
    tau_max: Optional[float] = None
    fsal: bool = True
    admissibility_policy: str = "warn"  # warn | strict | ignore

    def __post_init__(self):
        if not (np.isfinite(self.tau) and self.tau > 0):
            raise ConfigurationError(f"tau must be positive, got {self.tau}")
        if self.tau_max is not None and self.tau > self.tau_max:
            raise ConfigurationError(f"tau {self.tau} exceeds guard tau_max {self.tau_max}")
        if self.K < 1:
            raise ConfigurationError("spectral degree K must be >= 1")
        if self.dealias_nodes == 0:
            object.__setattr__(self, "dealias_nodes", 4 * self.K + 1)
        if self.dealias_nodes < 4 * self.K + 1:
            raise ConfigurationError(
                f"dealias_nodes must be >= 4K+1 = {4 * self.K + 1}, got {self.dealias_nodes}"
            )
        if self.admissibility_policy not in ("warn", "strict", "ignore"):
            raise ConfigurationError(
                f"unknown admissibility policy {self.admissibility_policy!r}"
            )


class _Engine:
    """Precomputed multiplier tables and transform plan for one config."""

    def __init__(self, problem: ProblemSpec, cfg: IntegratorConfig):
        self.problem = problem
        self.cfg = cfg
        K, tau = cfg.K, cfg.tau
        self.K = K
        self.tau = tau
        self.kappa = problem.kappa

        w1 = omega_weights(K)
        w2 = omega_weights(2 * K)
        self.cos_t = np.cos(tau * w1)
        self.sinc_t = flt.sinc(tau * w1)
        self.wsin_t = w1 * np.sin(tau * w1)
        self.phi_t = np.asarray(flt.phi(cfg.filter, tau * w1))
        self.psi1_t = np.asarray(flt.psi1(cfg.filter, tau * w1))
        self.psi1_t2 = np.asarray(flt.psi1(cfg.filter, tau * w2))
        # exact product grid for two degree-K factors (degree-2K result)
        self.n_prod = scipy.fft.next_fast_len(max(cfg.dealias_nodes, 4 * K + 1), real=True)
        self.n_interp = 2 * K + 1

        self._check_filter()

    def _check_filter(self):
        if self.cfg.admissibility_policy == "ignore":
            return
        grid = flt.default_xi_grid(n=512, xi_max=max(4.0, 2.0 * self.tau * np.sqrt(self.K**2 + 1)))
        report = flt.check_assumptions(self.cfg.filter, delta=0.5, a0=0.0, xi_grid=grid)
        if report.assumption1_ok and report.assumption2_ok:
            return
        msg = (
            f"filter {self.cfg.filter.label!r} violates the sinc-compatibility/boundedness "
            "conditions; expect step-size restrictions coupled to the spatial resolution"
        )
        if self.cfg.admissibility_policy == "strict":
            raise ConfigurationError(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=3)

    # -- nonlinearity -------------------------------------------------

    def interp_nonlinearity(self, c: np.ndarray) -> np.ndarray:
        """Coefficients (degree 2K) of aK(u)*u_xx + gK(u, u_x) for coefficients c of u.

        aK and gK are degree-K trigonometric interpolants of the pointwise
        nonlinearities on the 2K+1-node grid; the quasilinear product is
        formed exactly in degree 2K on a resolving grid.
        """
        K = self.K
        j = np.arange(-K, K + 1, dtype=float)
        uvals = synthesize_values(c, self.n_interp)
        avals = np.asarray(self.problem.a(uvals), dtype=float)
        if not np.all(np.isfinite(avals)):
            raise DivergenceError("nonlinearity a(u) overflowed")
        a_k = coeffs_from_samples(avals, K)
        uxx = -(j * j) * c
        out = self._product_2k(a_k, uxx)
        if self.problem.g is not None:
            ux_vals = synthesize_values(1j * j * c, self.n_interp)
            gvals = np.asarray(self.problem.g(uvals, ux_vals), dtype=float)
            if not np.all(np.isfinite(gvals)):
                raise DivergenceError("nonlinearity g(u, u_x) overflowed")
            out[K : 3 * K + 1] += coeffs_from_samples(gvals, K)
        return out

    def _product_2k(self, ca: np.ndarray, cb: np.ndarray) -> np.ndarray:
        """Exact degree-2K coefficients of the product of two degree-K fields."""
        if self.K <= 16:
            return np.convolve(ca, cb)
        va = synthesize_values(ca, self.n_prod)
        vb = synthesize_values(cb, self.n_prod)
        return coeffs_from_samples(va * vb, 2 * self.K)

    def fhat(self, c: np.ndarray) -> np.ndarray:
        """Filtered nonlinearity: force filter o interp nonlinearity o position filter.

        The force filter commutes with the degree-K truncation, so it is
        applied after the mode cut; the coefficients are identical.
        """
        f2 = self.interp_nonlinearity(self.phi_t * c)
        K = self.K
        return self.psi1_t * f2[K : 3 * K + 1]

    # -- one step ------------------------------------------------------

    def step_arrays(self, u, ud, fn=None):
        """One step on raw coefficient arrays; returns (u', ud', F(u'))."""
        tau, kappa = self.tau, self.kappa
        if kappa == 0.0:
            u1 = self.cos_t * u + tau * self.sinc_t * ud
            ud1 = -self.wsin_t * u + self.cos_t * ud
            return u1, ud1, None
        if fn is None:
            fn = self.fhat(u)
        u1 = self.cos_t * u + tau * self.sinc_t * ud + 0.5 * tau * tau * kappa * self.sinc_t * fn
        fn1 = self.fhat(u1)
        ud1 = (
            -self.wsin_t * u
            + self.cos_t * ud
            + 0.5 * tau * kappa * self.cos_t * fn
            + 0.5 * tau * kappa * fn1
        )
        return u1, ud1, fn1


def _require_degree(state: StatePair, cfg: IntegratorConfig):
    if state.degree != cfg.K:
        raise ConfigurationError(f"state degree {state.degree} does not match config K={cfg.K}")


def nonlinear_term(u: SpectralField, problem: ProblemSpec) -> SpectralField:
    """Unfiltered interpolated nonlinearity aK(u)*u_xx + gK(u,u_x), degree 2K."""
    engine = _Engine(problem, IntegratorConfig(tau=1.0, K=u.degree, filter=flt.impulse(),
                                               admissibility_policy="ignore"))
    return SpectralField(engine.interp_nonlinearity(u.coeffs))


def filtered_nonlinear_term(
    u: SpectralField, problem: ProblemSpec, cfg: IntegratorConfig
) -> SpectralField:
    """Filtered degree-K nonlinearity used inside one step."""
    if u.degree != cfg.K:
        raise ConfigurationError(f"field degree {u.degree} does not match config K={cfg.K}")
    engine = _Engine(problem, cfg)
    return SpectralField(engine.fhat(u.coeffs))


def linear_propagator(state: StatePair, t: float) -> StatePair:
    """Exact flow of the linear part over time t (norm-preserving rotation)."""
    w = omega_weights(state.degree)
    c, s = np.cos(t * w), np.sin(t * w)
    snc = t * np.asarray(flt.sinc(t * w))
    u, ud = state.u.coeffs, state.udot.coeffs
    return StatePair(
        SpectralField(c * u + snc * ud),
        SpectralField(-w * s * u + c * ud),
    )


def step(state: StatePair, problem: ProblemSpec, cfg: IntegratorConfig) -> StatePair:
    """Advance one time step with the one-step form of the scheme."""
    _require_degree(state, cfg)
    engine = _Engine(problem, cfg)
    u1, ud1, _ = engine.step_arrays(state.u.coeffs, state.udot.coeffs)
    return StatePair(SpectralField(u1), SpectralField(ud1))


def step_three_stage(state: StatePair, problem: ProblemSpec, cfg: IntegratorConfig) -> StatePair:
    """Advance one step in kick-rotate-kick form (algebraically identical)."""
    _require_degree(state, cfg)
    engine = _Engine(problem, cfg)
    tau, kappa = cfg.tau, problem.kappa
    u, ud = state.u.coeffs, state.udot.coeffs
    ud_plus = ud + (0.5 * tau * kappa * engine.fhat(u) if kappa != 0.0 else 0.0)
    u1 = engine.cos_t * u + tau * engine.sinc_t * ud_plus
    ud_minus = -engine.wsin_t * u + engine.cos_t * ud_plus
    ud1 = ud_minus + (0.5 * tau * kappa * engine.fhat(u1) if kappa != 0.0 else 0.0)
    return StatePair(SpectralField(u1), SpectralField(ud1))


def evolve(
    state0: StatePair,
    problem: ProblemSpec,
    cfg: IntegratorConfig,
    n_steps: int,
    observer: Optional[Callable[[int, float, StatePair], None]] = None,
) -> StatePair:
    """Iterate the one-step map n_steps times.

    The trailing nonlinearity evaluation of each step is reused as the
    next step's leading one when cfg.fsal is set; both modes produce
    bit-identical trajectories.  Raises DivergenceError (with the failing
    step index) on non-finite states and NormGuardError when the
    position/velocity norm exceeds cfg.max_norm.
    """
    if n_steps < 0:
        raise ConfigurationError("n_steps must be >= 0")
    _require_degree(state0, cfg)
    engine = _Engine(problem, cfg)
    u, ud = state0.u.coeffs.copy(), state0.udot.coeffs.copy()
    w1 = omega_weights(cfg.K)
    w2s = w1 * w1
    max_sq = cfg.max_norm * cfg.max_norm
    fn = None
    for n in range(1, n_steps + 1):
        try:
            u, ud, fn = engine.step_arrays(u, ud, fn if cfg.fsal else None)
        except DivergenceError as exc:
            raise DivergenceError(
                f"nonlinearity overflowed at step {n} (t={n * cfg.tau:g})",
                step=n, time=n * cfg.tau,
            ) from exc
        if not (np.all(np.isfinite(u.view(np.float64))) and np.all(np.isfinite(ud.view(np.float64)))):
            raise DivergenceError(
                f"non-finite state at step {n} (t={n * cfg.tau:g})", step=n, time=n * cfg.tau
            )
        norm_sq = float(np.sum(w2s * w2s * np.abs(u) ** 2) + np.sum(w2s * np.abs(ud) ** 2))
        if norm_sq > max_sq:
            raise NormGuardError(
                f"norm guard tripped at step {n} (t={n * cfg.tau:g}): "
                f"|state| = {np.sqrt(norm_sq):.3e} > {cfg.max_norm:.3e}",
                step=n, time=n * cfg.tau,
            )
        if observer is not None:
            observer(n, n * cfg.tau, StatePair(SpectralField(u), SpectralField(ud)))
    return StatePair(SpectralField(u), SpectralField(ud))


def with_filter(cfg: IntegratorConfig, spec: flt.FilterSpec) -> IntegratorConfig:
    """Copy of a config with a different filter."""
    return replace(cfg, filter=spec)


def with_tau(cfg: IntegratorConfig, tau: float) -> IntegratorConfig:
    """Copy of a config with a different time step."""
    return replace(cfg, tau=tau)
