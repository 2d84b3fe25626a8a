"""Finite-time and limiting laws of a single renewal process.

The central object is the state table Phi[n, t] = P[N(t) = n] for a
counting process driven by IID waiting times, built coefficient-wise as
survival * pmf^(*n) on a shared horizon.  Waiting laws may be defective,
in which case the process is transient and the limiting state law is
geometric.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import series
from .errors import ParameterError
from .laws import INFINITY, WaitingLaw

TYPE_I = "type_I"
TYPE_II = "type_II"
INTERMEDIATE = "intermediate"

#: float-safe boundary for classifying a law as non-defective
_TYPE_II_TOL = 1e-12


@dataclass
class StateTable:
    """Matrix ``probs[n, t]`` of state probabilities on 0 <= n, t <= T."""

    probs: np.ndarray

    @property
    def horizon(self) -> int:
        return self.probs.shape[1] - 1

    @property
    def n_max(self) -> int:
        return self.probs.shape[0] - 1

    def column(self, t: int) -> np.ndarray:
        """Distribution over the count n at fixed time t."""
        return self.probs[:, t]

    def row_sums(self) -> np.ndarray:
        """sum_n probs[n, t] for each t; 1 everywhere when n_max >= horizon."""
        return self.probs.sum(axis=0)

    def moment(self, order: int) -> np.ndarray:
        """sum_n n^order probs[n, t] as a series over t."""
        n = np.arange(self.probs.shape[0], dtype=float)
        return (n[:, None] ** order * self.probs).sum(axis=0)

    def polynomial(self, v) -> np.ndarray:
        """State polynomial sum_n probs[n, t] v^n over t; v may be complex."""
        n = np.arange(self.probs.shape[0])
        weights = np.asarray(v) ** n
        return weights @ self.probs

    def to_csv(self, path) -> None:
        """Write t rows by n columns."""
        with open(path, "w") as fh:
            header = ["t"] + [f"n{n}" for n in range(self.probs.shape[0])]
            fh.write(",".join(header) + "\n")
            for t in range(self.probs.shape[1]):
                cells = [str(t)] + [f"{v:.12g}" for v in self.probs[:, t]]
                fh.write(",".join(cells) + "\n")

    def to_json(self, path) -> None:
        payload = {
            "schema_version": 1,
            "horizon": self.horizon,
            "n_max": self.n_max,
            "probs": [[float(v) for v in row] for row in self.probs],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh)


def survival_series(law: WaitingLaw, horizon: int) -> np.ndarray:
    """P[no event up to and including t] = 1 - sum_{r<=t} pmf(r), t = 0..horizon."""
    if horizon < 0:
        raise ParameterError("horizon must be >= 0")
    if horizon == 0:
        return np.ones(1)
    return law.survival_vector(horizon)


def state_table(law: WaitingLaw, horizon: int) -> StateTable:
    """Full table P[N(t) = n] for 0 <= n, t <= horizon.

    Row n is survival * pmf^(*n); keeping n_max equal to the horizon makes
    the column sums exactly one.
    """
    if horizon < 0:
        raise ParameterError("horizon must be >= 0")
    if horizon == 0:
        return StateTable(np.ones((1, 1)))
    surv = survival_series(law, horizon)
    pmf = law.pmf_vector(horizon)
    probs = np.zeros((horizon + 1, horizon + 1))
    power = series.delta_series(horizon)
    for n in range(horizon + 1):
        probs[n] = series.convolve(surv, power)
        if n < horizon:
            power = series.convolve(power, pmf)
    return StateTable(probs)


def count_moments(law: WaitingLaw, horizon: int, validate: bool = False):
    """Series of E N(t) and E N^2(t) on [0, horizon], by expanding their
    rational generating functions pmf_gf / ((1-u)(1-pmf_gf)) and
    pmf_gf (1+pmf_gf) / ((1-u)(1-pmf_gf)^2).

    With ``validate=True`` the result is cross-checked against the state
    table summation; a discrepancy above 1e-8 raises.
    """
    pmf = law.pmf_vector(max(horizon, 1))[: horizon + 1]
    delta = series.delta_series(horizon)
    u1 = series.one_minus_u(horizon)
    mean = series.divide(pmf, series.convolve(u1, delta - pmf))
    second = series.divide(
        series.convolve(pmf, delta + pmf),
        series.convolve(u1, series.conv_power(delta - pmf, 2)),
    )
    if validate:
        table = state_table(law, horizon)
        err = max(
            np.max(np.abs(table.moment(1) - mean)),
            np.max(np.abs(table.moment(2) - second)),
        )
        if err > 1e-8:
            raise RuntimeError(
                f"moment cross-check failed: GF vs table differ by {err:.3e}"
            )
    return mean, second


def exceedance_prob(law: WaitingLaw, n0: int, t) -> float:
    """P[N(t) > n0]; at t = INFINITY this is defect_mass^(n0+1)."""
    if n0 < 0:
        raise ParameterError("n0 must be >= 0")
    if t == INFINITY:
        return law.defect_mass ** (n0 + 1)
    t = int(t)
    if t < 0:
        raise ParameterError("time must be >= 0")
    if n0 >= t:
        return 0.0
    horizon = max(t, 1)
    surv = survival_series(law, horizon)
    pmf = law.pmf_vector(horizon)
    power = series.delta_series(horizon)
    below = 0.0
    for _ in range(n0 + 1):
        below += series.convolve(surv, power)[t]
        power = series.convolve(power, pmf)
    return float(min(max(1.0 - below, 0.0), 1.0))


def classify(law: WaitingLaw) -> str:
    """TYPE_II when the waiting law has full mass, TYPE_I otherwise."""
    return TYPE_II if law.defect_mass >= 1.0 - _TYPE_II_TOL else TYPE_I


def limit_state_law(law: WaitingLaw, n_max: int = 64):
    """Limiting state probabilities (1-Q) Q^n and the process class label.

    For a defective law the count freezes at a geometric level; for a
    non-defective law every fixed level has limiting probability zero.
    """
    q = law.defect_mass
    n = np.arange(n_max + 1, dtype=float)
    masses = (1.0 - q) * q**n
    return masses, classify(law)


def never_stop_prob_renewal(law: WaitingLaw) -> float:
    """Probability the renewal process produces infinitely many events."""
    return 1.0 if law.defect_mass >= 1.0 - _TYPE_II_TOL else 0.0


def brute_force_state_table(law: WaitingLaw, horizon: int) -> StateTable:
    """Independent oracle: exhaust all event-time subsets of {1..horizon}.

    Each path is a strictly increasing tuple of event times with probability
    prod pmf(gaps) times the probability that the next waiting time overshoots
    the horizon.  Practical only for small horizons (exponential count).
    """
    if horizon > 20:
        raise ParameterError("exhaustive enumeration is for horizons <= 20")
    pmf = law.pmf_vector(max(horizon, 1))
    surv = survival_series(law, horizon)
    probs = np.zeros((horizon + 1, horizon + 1))
    t_axis = np.arange(horizon + 1)

    def walk(events: list, weight: float) -> None:
        last = events[-1] if events else 0
        tail = surv[horizon - last]
        # the finished path contributes to N(t) = #events <= t at every t
        n_of_t = np.searchsorted(events, t_axis, side="right")
        probs[n_of_t, t_axis] += weight * tail
        for nxt in range(last + 1, horizon + 1):
            w = weight * pmf[nxt - last]
            if w > 0.0:
                events.append(nxt)
                walk(events, w)
                events.pop()

    walk([], 1.0)
    return StateTable(probs)
