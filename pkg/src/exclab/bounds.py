"""Exact information-cost bounds for the exclusion game.

A zero-error classical message must let the receiver exclude the restriction
of the sender's string on every size-m subset.  Any one message therefore
leaves at most gamma(n, m) = sum_{i<m} C(n, i) strings possible, which gives
the lower bound n - log2(gamma) on the information cost of any classical
strategy.  On the quantum side, sending the n-qubit product encoding costs at
most n * H2(sin^2(theta_m / 2)) bits of entropy, and the information cost of
the quantum strategy is at most twice that.  The gap between the two is the
separation tabulated by ``separation_table``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from .pbr import critical_angle
from .qcore import ResourceLimitError, binary_entropy

# Largest n for which gamma is returned as an exact integer; beyond this the
# log-domain path must be used.
EXACT_GAMMA_MAX_N = 64


@dataclass(frozen=True)
class GameParameters:
    """Problem size of one exclusion game: string length n, subset size m."""

    n: int
    m: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.m <= self.n:
            raise ValueError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")


@dataclass(frozen=True)
class MRule:
    """Rule mapping n to the subset size m used in a separation table.

    ``power:c`` takes m = floor(n**c); ``linear:a`` takes m = floor(a*n).
    """

    kind: str
    value: float

    _KINDS = ("power", "linear")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"kind must be one of {self._KINDS}, got {self.kind!r}")
        if not 0.0 < self.value <= 1.0:
            raise ValueError(f"rule value must lie in (0, 1], got {self.value!r}")

    @classmethod
    def parse(cls, text: str) -> MRule:
        kind, sep, raw = text.partition(":")
        if not sep:
            raise ValueError(f"rule must look like 'power:0.75', got {text!r}")
        return cls(kind, float(raw))

    def apply(self, n: int) -> int:
        if self.kind == "power":
            m = math.floor(n ** self.value)
        else:
            m = math.floor(self.value * n)
        if not 1 <= m <= n:
            raise ValueError(f"rule {self.kind}:{self.value} gives m={m} at n={n}")
        return m


def gamma(n: int, m: int) -> int:
    """Exact count of strings one zero-error message cannot exclude.

    Equals sum_{i=0}^{m-1} C(n, i): the strings within Hamming distance m-1
    of the message.  Exact integers only up to n = EXACT_GAMMA_MAX_N; larger
    instances must go through ``gamma_log2``.
    """
    GameParameters(n, m)
    if n > EXACT_GAMMA_MAX_N:
        raise ResourceLimitError(
            f"exact gamma supports n <= {EXACT_GAMMA_MAX_N}; use gamma_log2"
        )
    return sum(math.comb(n, i) for i in range(m))


def gamma_log2(n: int, m: int) -> float:
    """log2 of gamma(n, m); exact for small n, log-domain sum for large n."""
    GameParameters(n, m)
    if n <= EXACT_GAMMA_MAX_N:
        return math.log2(gamma(n, m))
    return _gamma_log2_series(n, m)


def _gamma_log2_series(n: int, m: int) -> float:
    # Shift-compensated accumulation of sum_i exp(log C(n, i)); usable at any
    # n, and cross-checked against the exact path where both apply.
    i = np.arange(m, dtype=np.float64)
    log_terms = gammaln(n + 1.0) - gammaln(i + 1.0) - gammaln(n - i + 1.0)
    return float(logsumexp(log_terms) / math.log(2.0))


def classical_ic_lower_bound(params: GameParameters) -> float:
    """n - log2(gamma): information any zero-error classical message carries."""
    return max(0.0, params.n - gamma_log2(params.n, params.m))


def quantum_message_entropy_upper(params: GameParameters) -> float:
    """Entropy budget of the n-qubit product encoding at the critical angle.

    The equal mixture of the two bit states has eigenvalues cos^2(theta_m/2)
    and sin^2(theta_m/2), so each qubit carries at most H2 of that pair.  The
    sine form is evaluated because at large m the cosine eigenvalue sits next
    to 1 and would lose digits to cancellation inside the entropy.
    """
    half = 0.5 * critical_angle(params.m)
    return params.n * binary_entropy(math.sin(half) ** 2)


def quantum_ic_upper_bound(params: GameParameters) -> float:
    """Information cost of the quantum strategy: at most twice the entropy."""
    return 2.0 * quantum_message_entropy_upper(params)


def binomial_sum_entropy_bound(n: int, q: float) -> tuple[float, float]:
    """Both sides of log2( sum_{i<=qn} C(n,i) ) <= n*H2(q) for 0 < q <= 1/2.

    Returns ``(lhs, rhs)`` so callers can check the inequality at their own
    tolerance; the bound is tight in rate as n grows.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 < q <= 0.5:
        raise ValueError(f"q must lie in (0, 1/2], got {q!r}")
    lhs = gamma_log2(n, math.floor(q * n) + 1)
    rhs = n * binary_entropy(q)
    return lhs, rhs


@dataclass(frozen=True)
class BoundsRow:
    """One row of a separation table; field names match the CSV columns."""

    n: int
    m: int
    gamma_log2: float
    classical_ic_lower: float
    quantum_entropy_upper: float
    quantum_ic_upper: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "gamma_log2": self.gamma_log2,
            "classical_ic_lower": self.classical_ic_lower,
            "quantum_entropy_upper": self.quantum_entropy_upper,
            "quantum_ic_upper": self.quantum_ic_upper,
        }


def bounds_row(params: GameParameters) -> BoundsRow:
    """All four bound quantities for one game size."""
    return BoundsRow(
        n=params.n,
        m=params.m,
        gamma_log2=gamma_log2(params.n, params.m),
        classical_ic_lower=classical_ic_lower_bound(params),
        quantum_entropy_upper=quantum_message_entropy_upper(params),
        quantum_ic_upper=quantum_ic_upper_bound(params),
    )


def separation_table(n_values: Sequence[int], rule: MRule) -> tuple[BoundsRow, ...]:
    """Bound rows for each n with m drawn from ``rule``, in input order.

    An empty ``n_values`` yields an empty table (downstream, a header-only
    CSV), not an error.
    """
    return tuple(bounds_row(GameParameters(n, rule.apply(n))) for n in n_values)
