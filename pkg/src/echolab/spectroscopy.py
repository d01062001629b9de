"""Ramsey and echo spectroscopy of a two-internal-state system.

The workhorse object is a `SpectralPair`: the energies of the two
internal-state Hamiltonians plus the real overlap matrix O between their
eigenbases (O[m, n] = <state m of manifold 2 | state n of manifold 1>).
Everything here is basis-side linear algebra; it applies identically to the
1D trap pairs from `trap1d` and to the billiard pairs from `overlaps`.

Phase conventions: the microwave pulses are instantaneous and the drive is
detuned by delta_mw from the bare hyperfine splitting E_hf.  Because every
formula depends only on energy *differences* within and between the two
manifolds measured relative to the drive, E_hf never appears explicitly —
predictions are invariant under adding a constant to all manifold-2 energies
together with the matching E_hf shift.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidParameterError, TruncationError

__all__ = [
    "SpectralPair",
    "PulseSequence",
    "ThermalWeights",
    "EchoCurve",
    "generalized_detuning",
    "ramsey_p2",
    "ramsey_contrast",
    "ensemble_contrast",
    "echo_amplitude",
    "echo_p2",
    "long_time_echo",
    "thermal_average",
]


@dataclass
class SpectralPair:
    """Eigen-energies of both internal-state manifolds and their overlaps.

    ``overlaps[m, n] = <2, m | 1, n>`` is real; columns may lose probability
    to states outside the retained manifold-2 window (truncation), never
    gain it.  ``max_truncation`` bounds the tolerated per-column deficiency
    1 - sum_m overlaps[m, n]^2.
    """

    energies_1: np.ndarray
    energies_2: np.ndarray
    overlaps: np.ndarray = field(repr=False)
    max_truncation: float = 0.01

    def __post_init__(self):
        self.energies_1 = np.asarray(self.energies_1, dtype=float)
        self.energies_2 = np.asarray(self.energies_2, dtype=float)
        self.overlaps = np.asarray(self.overlaps, dtype=float)
        m, n = self.overlaps.shape
        if m != len(self.energies_2) or n != len(self.energies_1):
            raise InvalidParameterError(
                "overlap matrix shape does not match the energy lists"
            )
        deficiency = 1.0 - np.sum(self.overlaps**2, axis=0)
        worst = float(deficiency.max())
        if worst > self.max_truncation:
            raise TruncationError(
                f"overlap column loses {worst:.4f} probability to states "
                f"outside the retained window (allowed {self.max_truncation})"
            )

    @property
    def n_states(self) -> int:
        return self.overlaps.shape[1]


@dataclass(frozen=True)
class PulseSequence:
    """An idealized microwave pulse sequence.

    kind "ramsey" is pi/2 -- tau1 -- pi/2; kind "echo" is
    pi/2 -- tau1 -- pi -- tau2 -- pi/2 (tau2 defaults to tau1).
    ``delta_mw`` is the drive detuning from the bare hyperfine splitting.
    """

    kind: str
    tau1: float
    tau2: Optional[float] = None
    delta_mw: float = 0.0

    def __post_init__(self):
        if self.kind not in ("ramsey", "echo"):
            raise InvalidParameterError(f"unknown pulse sequence {self.kind!r}")
        if self.tau1 < 0 or (self.tau2 is not None and self.tau2 < 0):
            raise InvalidParameterError("pulse separations must be non-negative")

    def p2(self, pair: "SpectralPair", n: int) -> float:
        """Final excited-state population for initial eigenstate n."""
        if self.kind == "ramsey":
            return float(ramsey_p2(pair, n, [self.tau1], self.delta_mw).values[0])
        a = echo_amplitude(pair, n, self.tau1, tau2=self.tau2,
                           delta_mw=self.delta_mw)
        return 0.5 * (1.0 - a.real)


@dataclass
class ThermalWeights:
    """Boltzmann weights over the retained manifold-1 states.

    Weights are exp(-E/T) normalized over the retained window; if the
    retained window covers less than ``min_coverage`` of the full partition
    sum (estimated by extending the exponential tail), a warning is issued.
    """

    weights: np.ndarray
    temperature: float

    @classmethod
    def boltzmann(cls, energies: Sequence[float], temperature: float,
                  min_coverage: float = 0.99) -> "ThermalWeights":
        if temperature <= 0:
            raise InvalidParameterError("temperature must be positive")
        e = np.asarray(energies, dtype=float)
        w = np.exp(-(e - e.min()) / temperature)
        total = float(w.sum())
        if len(e) > 1:
            # geometric-tail estimate of the weight beyond the window
            ratio = float(w[-1] / w[-2]) if w[-2] > 0 else 0.0
            tail = w[-1] * ratio / (1.0 - ratio) if 0 < ratio < 1 else 0.0
            coverage = total / (total + tail)
            if coverage < min_coverage:
                warnings.warn(
                    f"thermal window covers only {coverage:.4f} of the "
                    f"partition sum (wanted >= {min_coverage}); results are "
                    "truncated",
                    stacklevel=2,
                )
        return cls(weights=w / total, temperature=temperature)

    @classmethod
    def single_state(cls, n_states: int, index: int) -> "ThermalWeights":
        w = np.zeros(n_states)
        w[index] = 1.0
        return cls(weights=w, temperature=0.0)


@dataclass
class EchoCurve:
    """A spectroscopy observable sampled on a time grid.

    Ensemble curves carry the per-state components and the weights that
    produced them; single-state curves leave those fields as None.
    """

    times: np.ndarray
    values: np.ndarray
    per_state: Optional[np.ndarray] = field(default=None, repr=False)
    weights: Optional[np.ndarray] = field(default=None, repr=False)

    def minimum(self) -> float:
        return float(self.values.min())

    def maximum(self) -> float:
        return float(self.values.max())


# ---------------------------------------------------------------------------
# Ramsey
# ---------------------------------------------------------------------------


def _ramsey_sum(pair: SpectralPair, n: int, taus: np.ndarray,
                delta_mw: float) -> np.ndarray:
    """S_n(tau) = sum_m |O_mn|^2 exp(-i (E2_m - E1_n - delta_mw) tau)."""
    w = pair.overlaps[:, n] ** 2
    de = pair.energies_2 - pair.energies_1[n] - delta_mw
    return np.exp(-1j * np.outer(taus, de)) @ w


def ramsey_p2(pair: SpectralPair, n: int, taus: Sequence[float],
              delta_mw: float = 0.0) -> EchoCurve:
    """Excited-state population after a pi/2 -- tau -- pi/2 Ramsey sequence,
    starting from manifold-1 eigenstate n."""
    taus = np.asarray(taus, dtype=float)
    s = _ramsey_sum(pair, n, taus, delta_mw)
    return EchoCurve(times=taus, values=0.5 * (1.0 + np.real(s)))


def ramsey_contrast(pair: SpectralPair, n: int,
                    taus: Sequence[float]) -> EchoCurve:
    """Fringe contrast |S_n(tau)|: the drive-independent envelope of the
    Ramsey oscillation."""
    taus = np.asarray(taus, dtype=float)
    s = _ramsey_sum(pair, n, taus, delta_mw=0.0)
    return EchoCurve(times=taus, values=np.abs(s))


def ensemble_contrast(pair: SpectralPair, weights: "ThermalWeights",
                      taus: Sequence[float]) -> EchoCurve:
    """Fringe contrast of the thermally averaged Ramsey signal.

    This is |sum_n w_n S_n(tau)| — the modulus of the weighted *complex*
    sum, not the average of per-state contrasts — so it also captures the
    ensemble dephasing caused by the spread of generalized detunings
    across populated states.
    """
    taus = np.asarray(taus, dtype=float)
    w = np.asarray(weights.weights, dtype=float)
    total = np.zeros(len(taus), dtype=complex)
    for n, wn in enumerate(w):
        if wn == 0.0:
            continue
        total += wn * _ramsey_sum(pair, n, taus, delta_mw=0.0)
    return EchoCurve(times=taus, values=np.abs(total), weights=w)


def generalized_detuning(pair: SpectralPair, n: int, tau: float,
                         delta_mw: float = 0.0) -> float:
    """Effective state-dependent detuning Delta_n(tau).

    Defined through the accumulated Ramsey phase, -arg(S_n(tau)) / tau, on
    the branch closest to the naive diagonal value E2_n - E1_n - delta_mw.
    Warns when the fringe amplitude |S_n| is too small for the phase to be
    meaningful.
    """
    if tau <= 0:
        raise InvalidParameterError("tau must be positive")
    s = complex(_ramsey_sum(pair, n, np.array([tau]), delta_mw)[0])
    if abs(s) < 0.1:
        warnings.warn(
            f"Ramsey amplitude |S_{n}({tau:g})| = {abs(s):.3f} < 0.1; the "
            "generalized detuning is poorly defined here",
            stacklevel=2,
        )
    anchor = float(pair.energies_2[min(n, len(pair.energies_2) - 1)]
                   - pair.energies_1[n] - delta_mw)
    raw = -np.angle(s) / tau
    # shift by whole fringes onto the branch nearest the diagonal value
    period = 2.0 * math.pi / tau
    return float(raw + period * round((anchor - raw) / period))


# ---------------------------------------------------------------------------
# echo
# ---------------------------------------------------------------------------


def _phase_matrix(pair: SpectralPair, tau: float, delta: float) -> np.ndarray:
    """P(tau) = O^T diag(exp(-i (E2 - delta) tau)) O  (symmetric)."""
    phases = np.exp(-1j * (pair.energies_2 - delta) * tau)
    return (pair.overlaps.T * phases) @ pair.overlaps


def echo_amplitude(pair: SpectralPair, n: int, tau: float,
                   tau2: Optional[float] = None,
                   delta_mw: float = 0.0) -> complex:
    """Coherence amplitude A_n after pi/2 -- tau -- pi -- tau2 -- pi/2.

    With tau2 = tau (default) the drive detuning cancels exactly and A_n is
    drive independent; for unbalanced arms the residual drive phase
    delta_mw (tau2 - tau) is included.
    """
    if tau2 is None:
        tau2 = tau
    e1 = pair.energies_1
    p1 = _phase_matrix(pair, tau, delta_mw)
    if tau2 == tau:
        p2 = p1
    else:
        p2 = _phase_matrix(pair, tau2, delta_mw)
    # A_n = e^{i E1_n tau1} sum_k conj(P(tau2))[n,k] e^{-i E1_k tau2} P(tau1)[k,n]
    vec = np.conj(p2[n, :]) * np.exp(-1j * e1 * tau2) * p1[:, n]
    return complex(np.exp(1j * e1[n] * tau) * np.sum(vec))


def echo_p2(pair: SpectralPair, n: int, taus: Sequence[float],
            delta_mw: float = 0.0) -> EchoCurve:
    """Excited-state population of the balanced echo sequence versus arm
    time tau: P2 = (1 - Re A_n) / 2."""
    taus = np.asarray(taus, dtype=float)
    vals = np.empty(len(taus))
    e1 = pair.energies_1
    for i, tau in enumerate(taus):
        p = _phase_matrix(pair, float(tau), delta_mw)
        col = p[:, n]
        a = np.exp(1j * e1[n] * tau) * np.sum(np.conj(col) * np.exp(-1j * e1 * tau) * col)
        vals[i] = 0.5 * (1.0 - float(np.real(a)))
    return EchoCurve(times=taus, values=vals)


def _echo_p2_all(pair: SpectralPair, taus: np.ndarray,
                 delta_mw: float) -> np.ndarray:
    """Echo P2 for every initial state at once.

    The phase matrix depends only on tau, so sharing it across initial
    states turns the ensemble echo from O(n_states) matrix builds per time
    point into one.
    """
    e1 = pair.energies_1
    out = np.empty((len(e1), len(taus)))
    for i, tau in enumerate(taus):
        p = _phase_matrix(pair, float(tau), delta_mw)
        a = np.exp(1j * e1 * tau) * ((np.abs(p.T) ** 2) @ np.exp(-1j * e1 * tau))
        out[:, i] = 0.5 * (1.0 - np.real(a))
    return out


def long_time_echo(pair: SpectralPair, weights: ThermalWeights) -> float:
    """Infinite-time average of the thermal echo signal.

    For a non-degenerate incommensurate spectrum the dominant surviving
    phase term gives P2_bar = (1 - sum_n w_n |O_nn|^4) / 2.  The neglected
    stationary terms are quartic in off-diagonal overlaps, so the formula is
    accurate when O is close to diagonal (the perturbative regime) and at
    worst O(1/window size) otherwise.
    """
    n = min(pair.overlaps.shape)
    diag = np.array([pair.overlaps[i, i] for i in range(n)])
    w = np.asarray(weights.weights, dtype=float)[:n]
    return float(0.5 * (1.0 - np.sum(w * diag**4)))


def thermal_average(pair: SpectralPair, weights: ThermalWeights,
                    taus: Sequence[float], kind: str = "echo",
                    delta_mw: float = 0.0) -> EchoCurve:
    """Thermal (Boltzmann-weighted) average of a per-state observable.

    ``kind`` selects echo P2, Ramsey P2, or Ramsey contrast.
    """
    taus = np.asarray(taus, dtype=float)
    w = np.asarray(weights.weights, dtype=float)
    if len(w) > pair.n_states:
        raise InvalidParameterError("more weights than retained states")
    if kind == "echo":
        per_state = _echo_p2_all(pair, taus, delta_mw)[:len(w)].copy()
        per_state[w == 0.0] = 0.0
    elif kind in ("ramsey", "contrast"):
        per_state = np.zeros((len(w), len(taus)))
        for n, wn in enumerate(w):
            if wn == 0.0:
                continue
            if kind == "ramsey":
                curve = ramsey_p2(pair, n, taus, delta_mw)
            else:
                curve = ramsey_contrast(pair, n, taus)
            per_state[n] = curve.values
    else:
        raise InvalidParameterError(f"unknown observable kind {kind!r}")
    return EchoCurve(times=taus, values=w @ per_state,
                     per_state=per_state, weights=w)
