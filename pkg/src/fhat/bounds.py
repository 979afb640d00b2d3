"""Converse bounds overlaid on empirical error curves.

Three channels:

* a weak (data-processing) bound on the achievable rate
  (1/N) ln(1/phi), valid for every strategy;
* a strong (tail-probability) bound on the absolute ln(1/phi), either
  estimated from weighted-LLR samples of the strategy under test or, for
  the two-sensor binary family, in closed form via an exact binomial
  quantile;
* the asymptotic rate D*(i) itself.

Everything is in nats; dB conversion (10 log10) happens at reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .belief import prior_belief, tilde_log
from .game import GameSolution
from .model import HypothesisModel
from .numerics import LN2, nats_to_db


def cross_entropy_start(model: HypothesisModel, game: GameSolution) -> float:
    """H(beta*, tilde_rho_1): the prior's contribution to the bounds."""
    lt1 = tilde_log(prior_belief(model), game.reference)
    return float(-np.dot(game.beta_star, lt1))


def weak_converse(game: GameSolution, model: HypothesisModel, N: int,
                  epsilon: float) -> float:
    """Strategy-independent upper bound on (1/N) ln(1/phi_N(i)):

        (D*(i) + H(beta*, tilde_rho_1)/N + ln2/N) / (1 - eps).
    """
    if not 0 <= epsilon < 1:
        raise ValueError(f"epsilon must be in [0, 1), got {epsilon}")
    h1 = cross_entropy_start(model, game)
    return (game.value + h1 / N + LN2 / N) / (1.0 - epsilon)


def strong_converse_empirical(zbar_samples, h_start: float, chi: float,
                              epsilon: float) -> float:
    """Tail-probability bound at one cut point chi:

        ln(1/phi) <= chi - ln( P_i[Zbar_N + h_start <= chi] - eps )

    with the tail probability replaced by its empirical frequency.
    Returns +inf ("unbounded") when the frequency does not exceed eps —
    the bound is vacuous at this chi and the caller should sweep.
    """
    z = np.asarray(zbar_samples, dtype=float)
    if z.size == 0:
        raise ValueError("need at least one sample")
    p_hat = float(np.mean(z + h_start <= chi))
    if p_hat <= epsilon:
        return math.inf
    return chi - math.log(p_hat - epsilon)


def strong_converse_sweep(zbar_samples, h_start: float,
                          epsilon: float) -> tuple[float, float]:
    """Sweep chi over the sample's empirical quantile points and return
    (best chi, tightest finite bound)."""
    z = np.sort(np.asarray(zbar_samples, dtype=float)) + h_start
    best_chi, best = math.nan, math.inf
    T = z.size
    # At chi = z[k], the empirical tail frequency is (k+1)/T.
    k0 = int(math.floor(epsilon * T))   # below this the bound is vacuous
    for k in range(k0, T):
        p_hat = (k + 1) / T
        if p_hat <= epsilon:
            continue
        val = z[k] - math.log(p_hat - epsilon)
        if val < best:
            best, best_chi = val, float(z[k])
    return best_chi, best


def binomial_quantile(N: int, p: float, q: float) -> int:
    """Smallest k with CDF_{Bin(N,p)}(k) >= q, by exact log-space PMF
    accumulation (no normal approximation)."""
    if not 0 < p < 1 or not 0 < q < 1:
        raise ValueError("need 0 < p < 1 and 0 < q < 1")
    k = np.arange(N + 1)
    log_pmf = (math.lgamma(N + 1)
               - np.array([math.lgamma(v + 1) for v in k])
               - np.array([math.lgamma(N - v + 1) for v in k])
               + k * math.log(p) + (N - k) * math.log1p(-p))
    shift = log_pmf.max()
    cdf = np.cumsum(np.exp(log_pmf - shift)) * math.exp(shift)
    idx = int(np.searchsorted(cdf, q, side="left"))
    return min(idx, N)


def strong_bound_binary_example(N: int, nu: float, epsilon: float) -> float:
    """Closed-form strong bound for the two-sensor binary family.

    There the weighted LLR walk is i.i.d. regardless of the strategy and
    reduces to a count K ~ Bin(N, nu) of zero observations:

        chi* = (Q(2 eps) - N/2) ln(nu/(1-nu)) + ln 2,
        ln(1/phi) <= chi* - ln(eps),

    where Q is the Bin(N, nu) quantile function.  Inapplicable to models
    without this structure; use strong_converse_empirical there.
    """
    if not 0 < nu < 1:
        raise ValueError(f"nu must be in (0, 1), got {nu}")
    if not 0 < 2 * epsilon < 1:
        raise ValueError("need 0 < 2*epsilon < 1")
    k_star = binomial_quantile(N, nu, 2.0 * epsilon)
    chi_star = (k_star - N / 2.0) * math.log(nu / (1.0 - nu)) + LN2
    return chi_star - math.log(epsilon)


@dataclass(frozen=True)
class BoundsRow:
    """Per-horizon bound values (rates in nats/step, absolutes in nats)."""

    N: int
    epsilon: float
    weak_rate: float
    strong_abs: float      # +inf when no strong channel applies
    strong_db: float
    asymptotic_rate: float


def bounds_table(model: HypothesisModel, game: GameSolution, horizons,
                 epsilon_of_n, nu: float | None = None) -> list[BoundsRow]:
    """Evaluate the bound overlays on a horizon grid.  `nu` enables the
    closed-form strong bound for the binary two-sensor family."""
    rows = []
    for N in horizons:
        eps = epsilon_of_n(N)
        weak = weak_converse(game, model, N, eps)
        strong = (strong_bound_binary_example(N, nu, eps)
                  if nu is not None else math.inf)
        rows.append(BoundsRow(N=N, epsilon=eps, weak_rate=weak,
                              strong_abs=strong,
                              strong_db=float(nats_to_db(strong)),
                              asymptotic_rate=game.value))
    return rows
