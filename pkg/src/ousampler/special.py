"""Integer-shape regularized incomplete gamma function and the negative-binomial
attempt-count distribution.

These two primitives carry the series machinery of the epoch functionals: the
total service time of an epoch is a sum of ``rho`` i.i.d. exp(mu) draws, where
``rho`` (the number of channel attempts needed for K successes over an erasure
channel) is negative-binomial, and the resulting Gamma-mixture CDFs reduce to
regularized incomplete gamma evaluations at integer shapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TruncationPlan",
    "reg_incomplete_gamma",
    "reg_gamma_ladder",
    "negbin_pmf",
    "make_truncation_plan",
]

# Hard cap on series length so a mistyped eps ~ 1 fails loudly instead of looping.
_MAX_TERMS = 5_000_000


def _check_shape(n: int) -> int:
    if not float(n).is_integer() or n < 1:
        raise ValueError(f"gamma shape must be an integer >= 1, got {n!r}")
    return int(n)


def reg_incomplete_gamma(x: float, n: int) -> float:
    """Regularized lower incomplete gamma function at integer shape.

    Returns ``gamma(x, n) = 1 - e^(-x) * sum_{j=0}^{n-1} x^j / j!``, i.e. the
    CDF of a Gamma(n, 1) variable at ``x``. The sum is accumulated through the
    Poisson-pmf recurrence ``term_{j+1} = term_j * x / (j+1)``: every term stays
    in [0, 1], so no ``x^j`` or ``j!`` is ever formed and nothing can overflow.

    Monotone nondecreasing in ``x`` and nonincreasing in ``n``.
    """
    n = _check_shape(n)
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0.0:
        return 0.0
    term = math.exp(-x)
    total = term
    for j in range(1, n):
        term *= x / j
        total += term
    # total can exceed 1 by a few ulp for large n
    return max(0.0, 1.0 - total)


def reg_gamma_ladder(x: float, n_max: int) -> np.ndarray:
    """``gamma(x, n)`` for every shape ``n = 1..n_max``, sharing one term sweep.

    One pass of the Poisson-term recurrence serves all shapes at once:
    ``gamma(x, n+1) = gamma(x, n) - e^(-x) x^n / n!``. The epoch-functional
    series need consecutive shapes ``rho`` and ``rho+1`` for every ``rho`` in
    the truncation range, which makes the ladder O(n_max) total instead of
    O(n_max^2) repeated scalar calls.
    """
    n_max = _check_shape(n_max)
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0.0:
        return np.zeros(n_max)
    terms = np.empty(n_max)
    t = math.exp(-x)
    terms[0] = t
    for j in range(1, n_max):
        t *= x / j
        terms[j] = t
    return np.maximum(0.0, 1.0 - np.cumsum(terms))


def negbin_pmf(rho: int, k: int, eps: float) -> float:
    """Probability that exactly ``rho`` channel attempts yield ``k`` successes.

    Attempts succeed independently with probability ``1 - eps``; the count of
    attempts until the k-th success is negative binomial on ``{k, k+1, ...}``
    with pmf ``C(rho-1, k-1) eps^(rho-k) (1-eps)^k``.
    """
    if k < 1 or not float(k).is_integer():
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must be in [0, 1), got {eps}")
    if not float(rho).is_integer() or rho < k:
        raise ValueError(f"rho must be an integer >= k={k}, got {rho!r}")
    rho, k = int(rho), int(k)
    if eps == 0.0:
        return 1.0 if rho == k else 0.0
    if k <= 50:
        return math.comb(rho - 1, k - 1) * eps ** (rho - k) * (1.0 - eps) ** k
    # log space: binomial coefficients overflow long before the pmf underflows
    log_pmf = (
        math.lgamma(rho)
        - math.lgamma(k)
        - math.lgamma(rho - k + 1)
        + (rho - k) * math.log(eps)
        + k * math.log1p(-eps)
    )
    return math.exp(log_pmf)


@dataclass(frozen=True, eq=False)
class TruncationPlan:
    """Finite evaluation window for the infinite attempt-count series.

    ``weights[i]`` is the negative-binomial pmf at ``rho = rho_min + i``;
    the pmf mass beyond ``rho_max`` is ``tail_mass`` (strictly below the
    tolerance the plan was built with).
    """

    k: int
    eps: float
    rho_min: int
    rho_max: int
    tail_mass: float
    weights: np.ndarray = field(repr=False)

    @property
    def rho(self) -> np.ndarray:
        return np.arange(self.rho_min, self.rho_max + 1)


def make_truncation_plan(k: int, eps: float, tol: float = 1e-12) -> TruncationPlan:
    """Smallest ``rho_max`` whose negative-binomial tail mass is below ``tol``.

    The pmf is accumulated with the ratio recurrence
    ``pmf(rho+1) = pmf(rho) * eps * rho / (rho - k + 1)``, so the plan build is
    a single O(rho_max) sweep sharing no state with ``negbin_pmf``.
    """
    if k < 1 or not float(k).is_integer():
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must be in [0, 1), got {eps} (eps = 1 never terminates)")
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must be in (0, 1), got {tol}")
    k = int(k)
    if eps == 0.0:
        return TruncationPlan(k, eps, k, k, 0.0, np.ones(1))
    weights = []
    p = (1.0 - eps) ** k
    cum = p
    rho = k
    weights.append(p)
    while 1.0 - cum >= tol:
        if rho - k >= _MAX_TERMS:
            raise ValueError(
                f"series for (k={k}, eps={eps}) needs more than {_MAX_TERMS} terms "
                f"to reach tail mass {tol}"
            )
        p *= eps * rho / (rho - k + 1)
        rho += 1
        weights.append(p)
        cum += p
    return TruncationPlan(k, eps, k, rho, max(0.0, 1.0 - cum), np.asarray(weights))
