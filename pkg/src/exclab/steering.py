"""Entanglement-steering protocol with abort.

For each input bit the sender holds one half of the two-qubit state
a0|00> + a1|11> and measures it in one of two bases, S for bit 0 and R for
bit 1.  Outcome 0 steers the receiver's half exactly onto the bit state at
the critical angle; outcome 1 steers it onto a fixed conjugate state
(|-> under S, |+> under R) carrying no usable signal.  A round succeeds when
all n pairs of one shared set give outcome 0; the parties burn through at
most k sets before aborting.  The per-pair success probability p_steer and
its n-fold product fix the abort budget, and ``choose_k`` inverts that budget
into the smallest workable k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .pbr import BitString, bit_state, critical_angle
from .qcore import RankOneMeasurement, StateVector

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class SteeringKit:
    """Everything both parties need for one bit at angle ``theta``.

    ``targets`` holds the four post-measurement states in branch order
    (bit 0 outcome 0, bit 0 outcome 1, bit 1 outcome 0, bit 1 outcome 1);
    ``branch_probs[bit][outcome]`` and ``branch_posts[bit][outcome]`` tabulate
    the same branches for sampling.
    """

    theta: float
    phi_ab: StateVector
    meas_s: RankOneMeasurement
    meas_r: RankOneMeasurement
    targets: tuple[StateVector, StateVector, StateVector, StateVector]
    branch_probs: tuple[tuple[float, float], tuple[float, float]]
    branch_posts: tuple[tuple[StateVector, StateVector],
                        tuple[StateVector, StateVector]]


def _project_sender(phi: StateVector, sender: StateVector) -> tuple[float, StateVector]:
    """Probability and receiver post-state when the sender's qubit (the most
    significant one) is projected onto ``sender``."""
    pair = phi.amplitudes.reshape(2, 2)
    receiver = pair.T @ sender.amplitudes.conj()
    probability = float(np.vdot(receiver, receiver).real)
    return probability, StateVector(receiver / math.sqrt(probability), 1)


@lru_cache(maxsize=None)
def build_kit(m: int) -> SteeringKit:
    """Steering kit at the critical angle for subset size m.

    The pair amplitudes a0, a1 and both bases are fixed by theta alone;
    construction verifies nothing beyond the orthonormality checks built into
    StateVector and RankOneMeasurement, leaving the steering identities to
    callers (the CLI recomputes them as residuals).
    """
    theta = critical_angle(m)
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    a0 = math.sqrt(0.5 * (1.0 + cos_t / (1.0 + sin_t)))
    a1 = math.sqrt(0.5 * (1.0 - cos_t / (1.0 + sin_t)))

    phi = StateVector(np.array([a0, 0.0, 0.0, a1]), 2)
    meas_s = RankOneMeasurement(
        (StateVector(np.array([a0, a1]), 1),
         StateVector(np.array([a1, -a0]), 1)),
        (0, 1),
    )
    meas_r = RankOneMeasurement(
        (StateVector(np.array([a0, -a1]), 1),
         StateVector(np.array([a1, a0]), 1)),
        (0, 1),
    )

    minus = StateVector(np.array([_INV_SQRT2, -_INV_SQRT2]), 1)
    plus = StateVector(np.array([_INV_SQRT2, _INV_SQRT2]), 1)
    targets = (bit_state(0, theta), minus, bit_state(1, theta), plus)

    probs = []
    posts = []
    for measurement in (meas_s, meas_r):
        branch = [_project_sender(phi, vector)
                  for vector in measurement.outcome_vectors]
        probs.append(tuple(p for p, _ in branch))
        posts.append(tuple(state for _, state in branch))

    return SteeringKit(
        theta=theta,
        phi_ab=phi,
        meas_s=meas_s,
        meas_r=meas_r,
        targets=targets,
        branch_probs=(probs[0], probs[1]),
        branch_posts=(posts[0], posts[1]),
    )


def steer_one(kit: SteeringKit, bit: int,
              rng: np.random.Generator) -> tuple[int, StateVector]:
    """Measure the sender's half for one bit; returns (outcome, post-state).

    Consumes exactly one uniform variate.
    """
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    p0 = kit.branch_probs[bit][0]
    outcome = 0 if rng.random() < p0 else 1
    return outcome, kit.branch_posts[bit][outcome]


def p_steer(m: int) -> float:
    """Per-pair probability of the steering outcome, 1/(1 + sin(theta_m))."""
    return 1.0 / (1.0 + math.sin(critical_angle(m)))


def p_global_steer(n: int, m: int) -> float:
    """Probability that all n pairs of one set steer, p_steer(m)**n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.exp(n * math.log(p_steer(m)))


def p_abort(n: int, m: int, k: int) -> float:
    """Probability every one of the k sets fails, (1 - p_global)**k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return math.exp(k * math.log1p(-p_global_steer(n, m)))


def choose_k(alpha: float, delta: float) -> int:
    """Smallest k with (1 - 4**(-1/alpha))**k <= delta.

    4**(-1/alpha) lower-bounds the global steering probability whenever
    m = alpha * n exactly, so k sets suffice to keep the abort probability
    at or below delta uniformly over such n.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")
    base = 1.0 - 4.0 ** (-1.0 / alpha)
    k = max(1, math.ceil(math.log(delta) / math.log(base)))
    # Guard the ceil against float edges on either side.
    while k > 1 and base ** (k - 1) <= delta:
        k -= 1
    while base ** k > delta:
        k += 1
    return k


@dataclass(frozen=True)
class SteeringParameters:
    """Protocol shape: n bits per set, angle from m, k sets, abort budget."""

    n: int
    m: int
    k: int
    delta: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.m <= self.n:
            raise ValueError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta!r}")


@dataclass(frozen=True, eq=False)
class SteeringRoundResult:
    """Outcome of one protocol round: either the index of the first fully
    steered set plus the receiver's n post-states, or an abort."""

    aborted: bool
    set_index: int | None
    receiver_states: tuple[StateVector, ...] | None


def run_steering_round(params: SteeringParameters, x: BitString,
                       rng: np.random.Generator) -> SteeringRoundResult:
    """Burn through up to k shared sets trying to steer all n bits of x.

    Within a set, pairs are measured in bit order and the set is abandoned at
    the first non-steering outcome, so failed sets consume only as many
    variates as pairs actually measured.
    """
    if len(x) != params.n:
        raise ValueError(f"x has length {len(x)}, expected n={params.n}")
    kit = build_kit(params.m)
    for set_index in range(params.k):
        states: list[StateVector] = []
        for bit in x:
            outcome, state = steer_one(kit, bit, rng)
            if outcome != 0:
                break
            states.append(state)
        else:
            return SteeringRoundResult(False, set_index, tuple(states))
    return SteeringRoundResult(True, None, None)
