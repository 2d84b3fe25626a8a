"""Infinite-time propagators of geometrically stopped walks and their
continuous-space limits.

On the lattice the stationary law is a Fourier integral over the torus,
here computed by tensor-product trapezoid quadrature (spectrally accurate
for these periodic integrands) with a refinement check.  In the scaling
limit of a rarely stopped walk the rescaled endpoint density becomes an
exponential mixture of alpha-stable densities; the stable densities
themselves are evaluated by direct oscillatory Fourier inversion with the
exact exponential envelope as cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln, roots_genlaguerre, roots_laguerre

from .errors import ParameterError, QuadratureError
from .laws import WaitingLaw
from .walks import PropagatorGrid, StepLaw

_FULL_MASS_TOL = 1e-12


def ness_scale(inner: WaitingLaw, q: float) -> float:
    """Rescaling length g/(q(1-g)), g = inner_gf(q): the expected frozen count.

    Computed from the exact generating function, not its small-p asymptote,
    to reduce pre-asymptotic bias in rescaled-endpoint experiments.
    """
    g = inner.gf(q)
    return g / (q * (1.0 - g))


def _torus_grid(step: StepLaw, psibar: float, panels: int, half_width: int):
    """Inverse Fourier transform of (1-g)/(1 - W(theta) g) on the box."""
    n = panels
    theta = -math.pi + 2.0 * math.pi * np.arange(n) / n
    x = np.arange(-half_width, half_width + 1)
    if step.dim == 1:
        w = np.zeros(n, dtype=complex)
        for vec, p in zip(step.displacements, step.probs):
            w += p * np.exp(-1j * theta * vec[0])
        f = (1.0 - psibar) / (1.0 - w * psibar)
        phase = np.exp(1j * np.outer(x, theta))
        vals = phase @ f / n
    elif step.dim == 2:
        w = np.zeros((n, n), dtype=complex)
        for vec, p in zip(step.displacements, step.probs):
            w += p * np.outer(
                np.exp(-1j * theta * vec[0]), np.exp(-1j * theta * vec[1])
            )
        f = (1.0 - psibar) / (1.0 - w * psibar)
        phase = np.exp(1j * np.outer(x, theta))
        vals = phase @ f @ phase.T / n**2
    else:
        raise ParameterError("lattice stationary law supports d <= 2 only")
    if np.max(np.abs(vals.imag)) > 1e-9:
        raise QuadratureError("inverse Fourier transform is not numerically real")
    return vals.real


def lattice_ness(
    step: StepLaw,
    inner: WaitingLaw,
    q: float,
    half_width: int,
    panels: int | None = None,
) -> PropagatorGrid:
    """Stationary propagator of a walk stopped at a geometric(p = 1-q) time.

    P(x, inf) = P_q(x, inf)/q - (p/q) delta_x0 where P_q is the inverse
    Fourier transform of (1-g)/(1 - W(theta) g), g = inner_gf(q).  The
    quadrature is repeated at half resolution; disagreement above 1e-6
    relative raises.
    """
    if not 0.0 < q < 1.0:
        raise ParameterError("q must be in (0, 1)")
    if inner.defect_mass < 1.0 - _FULL_MASS_TOL:
        raise ParameterError("inner law must be non-defective")
    if panels is None:
        panels = 4096 if step.dim == 1 else 512
    psibar = inner.gf(q)
    fine = _torus_grid(step, psibar, panels, half_width)
    coarse = _torus_grid(step, psibar, panels // 2, half_width)
    scale = np.max(np.abs(fine))
    if np.max(np.abs(fine - coarse)) > 1e-6 * scale:
        raise QuadratureError(
            "lattice quadrature did not converge; increase the panel count"
        )
    values = fine / q
    origin = (half_width,) * step.dim
    values[origin] -= (1.0 - q) / q
    return PropagatorGrid(values, half_width, math.inf, step.basis)


def stable_density(y, alpha: float, theta: float = 0.0) -> np.ndarray:
    """Stable density by Fourier inversion of exp(-(i^theta k)^alpha).

    (i^theta k)^alpha = |k|^alpha exp(i pi sgn(k) alpha theta / 2), so for
    real output it suffices to integrate over k > 0 and double the real
    part.  Admissible parameters are the symmetric family theta = 0 with
    alpha in (0, 2] and the one-sided family theta = 1 with alpha in (0, 1);
    other combinations are rejected rather than guessed.  Closed-form
    members: alpha=2 Gaussian (variance 2), alpha=1 Cauchy, alpha=1/2 with
    theta=1 the one-sided 1/(2 sqrt(pi)) y^(-3/2) exp(-1/(4y)).
    """
    if theta == 0.0:
        if not 0.0 < alpha <= 2.0:
            raise ParameterError("symmetric stable index must be in (0, 2]")
    elif theta == 1.0:
        if not 0.0 < alpha < 1.0:
            raise ParameterError("one-sided stable index must be in (0, 1)")
    else:
        raise ParameterError(f"unsupported stable asymmetry parameter {theta}")
    c = math.cos(math.pi * alpha * theta / 2.0)
    s = math.sin(math.pi * alpha * theta / 2.0)
    # envelope exp(-c k^alpha) below 1e-16 beyond the cutoff
    cutoff = (16.0 * math.log(10.0) / c) ** (1.0 / alpha)

    def even_part(k):
        return np.exp(-c * k**alpha) * np.cos(s * k**alpha)

    def odd_part(k):
        return np.exp(-c * k**alpha) * np.sin(s * k**alpha)

    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.empty_like(y_arr)
    for i, yi in enumerate(y_arr):
        total, _ = quad(
            even_part, 0.0, cutoff, weight="cos", wvar=yi, limit=400,
            epsabs=1e-12, epsrel=1e-12,
        )
        if s != 0.0:
            part, _ = quad(
                odd_part, 0.0, cutoff, weight="sin", wvar=yi, limit=400,
                epsabs=1e-12, epsrel=1e-12,
            )
            total += part
        out[i] = total / math.pi
    return out if np.ndim(y) else float(out[0])


def _one_sided_series(z: float, alpha: float) -> float:
    """Convergent large-argument series of the one-sided stable density.

    For alpha in (0, 1) the expansion (1/pi) sum_j (-1)^(j+1)
    G(j alpha + 1)/j! sin(pi j alpha) z^(-j alpha - 1) converges for every
    z > 0 and needs only a handful of terms once z is moderately large.
    """
    total = 0.0
    sign = 1.0
    small_streak = 0
    for j in range(1, 400):
        term = (
            sign
            * math.exp(gammaln(j * alpha + 1.0) - gammaln(j + 1.0))
            * math.sin(math.pi * j * alpha)
            * z ** (-j * alpha - 1.0)
        )
        total += term
        # individual terms can vanish (sin hits a lattice point), so stop
        # only after two successive negligible terms
        if abs(term) <= 1e-17 * max(abs(total), 1e-300):
            small_streak += 1
            if small_streak >= 2:
                break
        else:
            small_streak = 0
        sign = -sign
    return total / math.pi


@dataclass(frozen=True)
class NessCurve:
    """Sampled continuous stationary density over a stored support."""

    y: np.ndarray
    density: np.ndarray
    kind: str

    def trapezoid_mass(self) -> float:
        return float(np.trapezoid(self.density, self.y))

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("y,density\n")
            for yi, di in zip(self.y, self.density):
                fh.write(f"{yi:.12g},{di:.12g}\n")


def one_sided_exp_density(y, mean_displacement: float) -> np.ndarray:
    """(1/|A|) exp(-y/A) on the side of the bias, A the mean displacement."""
    a = mean_displacement
    if a == 0.0:
        raise ParameterError("mean displacement must be nonzero")
    y = np.asarray(y, dtype=float)
    ratio = y / a
    return np.where(ratio >= 0.0, np.exp(-np.clip(ratio, 0.0, None)) / abs(a), 0.0)


def laplace_density(y, msd: float) -> np.ndarray:
    """exp(-|y| sqrt(2/B)) / sqrt(2B), B the per-count mean squared step."""
    if not msd > 0.0:
        raise ParameterError("mean squared displacement must be positive")
    y = np.asarray(y, dtype=float)
    return np.exp(-np.abs(y) * math.sqrt(2.0 / msd)) / math.sqrt(2.0 * msd)


def one_sided_exp_curve(mean_displacement: float, y=None) -> NessCurve:
    if y is None:
        top = 14.0 * abs(mean_displacement)
        y = np.linspace(0.0, top, 1401) * math.copysign(1.0, mean_displacement)
        y = np.sort(y)
    y = np.asarray(y, dtype=float)
    return NessCurve(y, one_sided_exp_density(y, mean_displacement), "one_sided_exp")


def laplace_curve(msd: float, y=None) -> NessCurve:
    if y is None:
        top = 14.0 * math.sqrt(msd)
        y = np.linspace(-top, top, 2001)
    y = np.asarray(y, dtype=float)
    return NessCurve(y, laplace_density(y, msd), "laplace")


def stable_mixture_density(
    y, alpha: float, theta: float = 0.0, method: str = "adaptive", tau_nodes: int = 64
):
    """Exponential mixture integral_0^inf e^-tau tau^(-1/alpha)
    L_alpha(y tau^(-1/alpha)) dtau over the numeric stable density.

    The default outer quadrature is adaptive Gauss-Kronrod on [0, 45]
    (the e^-tau envelope is below 1e-19 beyond that), reaching well below
    1e-6 absolute error.  ``method='laguerre'`` uses a fixed Gauss-Laguerre
    rule with ``tau_nodes`` points instead (generalized weight absorbing
    the tau^(-1/alpha) singularity when alpha > 1); it is much faster but
    plateaus around 1e-4 because the integrand is not polynomial-like near
    tau = 0.  alpha = 1 with theta = 1 mixes point masses and collapses
    analytically to the unit one-sided exponential.
    """
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    if alpha == 1.0 and theta == 1.0:
        out = np.where(y_arr >= 0.0, np.exp(-np.clip(y_arr, 0.0, None)), 0.0)
        return out if np.ndim(y) else float(out[0])
    if method == "laguerre":
        if alpha > 1.0:
            nodes, weights = roots_genlaguerre(tau_nodes, -1.0 / alpha)
            prefactor = np.ones_like(nodes)
        else:
            nodes, weights = roots_laguerre(tau_nodes)
            prefactor = nodes ** (-1.0 / alpha)
        stretch = nodes ** (-1.0 / alpha)
        out = np.zeros_like(y_arr)
        for weight, pref, st in zip(weights, prefactor, stretch):
            out += weight * pref * stable_density(y_arr * st, alpha, theta)
        return out if np.ndim(y) else float(out[0])
    if method != "adaptive":
        raise ParameterError(f"unknown mixture method {method!r}")
    inv = 1.0 / alpha

    # The adaptive outer rule probes tiny tau, where the stable argument
    # explodes; route those evaluations through cheap exact limits (the
    # one-sided convergent tail series, the vanishing Gaussian tail) so the
    # oscillatory inner quadrature only runs at moderate arguments.
    def point_density(z: float) -> float:
        if theta == 1.0:
            if z <= 0.0:
                return 0.0
            if z > 10.0:
                return _one_sided_series(z, alpha)
        elif alpha == 2.0 and abs(z) > 60.0:
            return 0.0
        return float(stable_density(z, alpha, theta))

    out = np.empty_like(y_arr)
    for i, yi in enumerate(y_arr):
        if theta == 1.0 and yi <= 0.0:
            out[i] = 0.0
            continue

        def integrand(tau, yi=yi):
            return math.exp(-tau) * tau**-inv * point_density(yi * tau**-inv)

        out[i], _ = quad(integrand, 0.0, 45.0, epsabs=1e-10, epsrel=1e-10, limit=200)
    return out if np.ndim(y) else float(out[0])


def stable_mixture_curve(
    alpha: float,
    theta: float = 0.0,
    y=None,
    method: str = "adaptive",
    tau_nodes: int = 64,
) -> NessCurve:
    if y is None:
        if alpha == 1.0 and theta == 1.0:
            # analytic case, so a grid fine enough for trapezoid mass is free
            y = np.linspace(0.0, 25.0, 701)
        elif theta == 1.0:
            y = np.linspace(0.0, 25.0, 126)
        else:
            y = np.linspace(-18.0, 18.0, 145)
    y = np.asarray(y, dtype=float)
    return NessCurve(
        y,
        stable_mixture_density(y, alpha, theta, method=method, tau_nodes=tau_nodes),
        "stable_mixture",
    )


def continuous_ness_1d(kind: str, y=None, **params) -> NessCurve:
    """Dispatcher over the three continuous stationary-density families."""
    if kind == "one_sided_exp":
        return one_sided_exp_curve(params.pop("mean_displacement"), y=y)
    if kind == "laplace":
        return laplace_curve(params.pop("msd"), y=y)
    if kind == "stable_mixture":
        return stable_mixture_curve(
            params.pop("alpha"), params.pop("theta", 0.0), y=y,
            method=params.pop("method", "adaptive"),
            tau_nodes=int(params.pop("tau_nodes", 64)),
        )
    raise ParameterError(f"unknown stationary-density kind {kind!r}")
