"""Experiment-selection strategies and threshold inference rules.

Five selection rules share one interface:

* ``ors``           — sample i.i.d. from the game's optimal experiment
                      mixture (open loop, randomized);
* ``das``           — pick the experiment minimizing the belief-tilted
                      moment-generating-function score (deterministic,
                      adaptive);
* ``das-rs``        — same minimization restricted to the support of the
                      optimal mixture;
* ``chernoff-det``  — best single experiment against the currently most
                      likely alternate (the classical heuristic; kept as
                      a benchmark, it is not admissible in general);
* ``symmetric``     — maximum-likelihood composite: estimate the true
                      hypothesis from a uniform-prior posterior, then
                      delegate to that hypothesis's inner rule.

Tie-breaking is lowest index everywhere so runs are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import game as game_mod
from .belief import Belief, confidence, prior_belief, uniform_prior_log_posterior
from .game import GameSolution
from .model import HypothesisModel
from .numerics import logsumexp

KINDS = ("ors", "das", "das-rs", "chernoff-det", "symmetric")
SUPPORT_EPS = 1e-12
CRITERION_SLACK = 1e-12


def default_epsilon(N: int) -> float:
    """Correct-inference slack used by the experiments: min(0.05, 10/N)."""
    return min(0.05, 10.0 / N)


def s_schedule(N: int, M: int, epsilon: float, B: float) -> float:
    """Tilt parameter min{1, sqrt(2 ln(M/eps) / (N B^2))}.

    This is the exact balancer of the two Chernoff-bound penalty terms
    when the square root is below 1.
    """
    if N < 1 or M < 2 or not 0 < epsilon < 1 or B <= 0:
        raise ValueError("need N >= 1, M >= 2, 0 < epsilon < 1, B > 0")
    return min(1.0, math.sqrt(2.0 * math.log(M / epsilon) / (N * B * B)))


def mgf(model: HypothesisModel, i: int, j: int, u: int, s: float) -> float:
    """E_i[exp(-s * llr_j^i(u, Y))] = sum_y p_i(y)^(1-s) p_j(y)^s over
    the support of u.  Equals 1 at s = 0 and s = 1; at most 1 between."""
    idx = model.support_indices(u)
    lp = model.log_kernel[i, u, idx]
    lq = model.log_kernel[j, u, idx]
    return float(np.sum(np.exp((1.0 - s) * lp + s * lq)))


def mgf_matrix(model: HypothesisModel, i: int, s: float) -> np.ndarray:
    """mu[u, k] for alternates j != i (k indexes ascending j)."""
    alts = model.alternates(i)
    out = np.zeros((model.num_experiments, len(alts)))
    for u in range(model.num_experiments):
        for k, j in enumerate(alts):
            out[u, k] = mgf(model, i, j, u, s)
    return out


def tilted_alternate_log_weights(log_belief: np.ndarray, i: int, s: float) -> np.ndarray:
    """log of rho(j)^s / sum_k rho(k)^s over alternates (ascending j),
    computed with logsumexp; insensitive to the belief's normalization."""
    alts = np.concatenate([log_belief[:i], log_belief[i + 1:]])
    w = s * alts
    total = logsumexp(w)
    if not np.isfinite(total):
        raise ValueError("all alternate mass is zero; score undefined")
    return w - total


def score_all(model: HypothesisModel, i: int, belief: Belief, s: float,
              mu: np.ndarray | None = None) -> np.ndarray:
    """Tilted-MGF score of every experiment at the given belief."""
    if mu is None:
        mu = mgf_matrix(model, i, s)
    w = np.exp(tilted_alternate_log_weights(belief.log_prob, i, s))
    return mu @ w


def score_M(model: HypothesisModel, i: int, u: int, belief: Belief, s: float) -> float:
    """Score of a single experiment (lower is better for the tester)."""
    return float(score_all(model, i, belief, s)[u])


def criterion_holds(alpha_n, belief: Belief, s: float, game: GameSolution,
                    model: HypothesisModel, i: int) -> bool:
    """Admissibility check: the strategy's expected score at this belief
    must not exceed the optimal mixture's expected score."""
    scores = score_all(model, i, belief, s)
    lhs = float(np.dot(np.asarray(alpha_n, dtype=float), scores))
    rhs = float(np.dot(game.alpha_star, scores))
    return lhs <= rhs + CRITERION_SLACK


@dataclass(frozen=True)
class StrategySpec:
    """A fully resolved experiment-selection strategy for one run.

    Schedules (s_value) and lookup tables are frozen at construction;
    strategies are time-invariant given the horizon.
    """

    kind: str
    model: HypothesisModel
    reference: int | None = None
    s_value: float | None = None
    game: GameSolution | None = None
    sample_alpha: np.ndarray | None = None          # ors sampling mixture
    inner: tuple["StrategySpec", ...] | None = None  # symmetric: one per hypothesis
    mu: np.ndarray = field(repr=False, default=None)             # (U, M-1)
    support_mask: np.ndarray = field(repr=False, default=None)   # (U,) bool
    chernoff_u: np.ndarray = field(repr=False, default=None)     # (M-1,) int

    def is_deterministic(self) -> bool:
        """True when the next experiment is a function of the belief."""
        if self.kind == "ors":
            return bool(np.max(self.sample_alpha) >= 1.0 - SUPPORT_EPS)
        if self.kind == "symmetric":
            return all(inner.is_deterministic() for inner in self.inner)
        return True


def build_strategy(model: HypothesisModel, kind: str, horizon: int,
                   reference: int | None = None, epsilon: float | None = None,
                   sample_alpha=None, inner_kind: str = "das") -> StrategySpec:
    """Resolve a strategy: solve the game(s), fix the tilt schedule, and
    precompute per-run lookup tables.

    The symmetric composite requires a positive game value for every
    hypothesis (some experiment must separate every pair); asymmetric
    kinds accept zero-value games with a warning.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown strategy kind {kind!r}")
    if epsilon is None:
        epsilon = default_epsilon(horizon)

    if kind == "symmetric":
        if inner_kind not in ("ors", "das", "das-rs", "chernoff-det"):
            raise ValueError(f"invalid inner kind {inner_kind!r}")
        inner = []
        for i in range(model.num_hypotheses):
            spec_i = build_strategy(model, inner_kind, horizon, reference=i,
                                    epsilon=epsilon)
            if spec_i.game.value <= 0:
                raise ValueError(
                    f"symmetric strategy requires every hypothesis pair to be "
                    f"distinguishable by some experiment; hypothesis "
                    f"{model.hypotheses[i]} has game value 0")
            inner.append(spec_i)
        return StrategySpec(kind=kind, model=model, inner=tuple(inner))

    if reference is None:
        raise ValueError(f"strategy {kind!r} needs a reference hypothesis")
    sol = game_mod.solve(model, reference)
    s_val = s_schedule(horizon, model.num_hypotheses, epsilon, model.llr_bound)
    mu = mgf_matrix(model, reference, s_val)
    mask = sol.alpha_star > SUPPORT_EPS
    A = sol.payoff_matrix
    chern = np.array([int(np.argmax(A[:, k])) for k in range(A.shape[1])])
    alpha = sol.alpha_star if sample_alpha is None else np.asarray(sample_alpha, dtype=float)
    if abs(alpha.sum() - 1.0) > 1e-9 or np.any(alpha < 0):
        raise ValueError("sample_alpha must be a distribution over experiments")
    return StrategySpec(kind=kind, model=model, reference=reference,
                        s_value=s_val, game=sol, sample_alpha=alpha,
                        mu=mu, support_mask=mask, chernoff_u=chern)


def select_experiment(spec: StrategySpec, belief: Belief, rng) -> int:
    """Pick the next experiment.  `rng` (numpy Generator) is consumed
    only by randomized kinds; ties go to the lowest index."""
    if spec.kind == "ors":
        # Inverse CDF with the count-of-(cum <= r) convention; a draw of
        # exactly 0.0 then lands on the first positive-mass experiment.
        cum = np.cumsum(spec.sample_alpha)
        return int(min(int((cum <= rng.random()).sum()), len(cum) - 1))
    if spec.kind == "das":
        scores = score_all(spec.model, spec.reference, belief, spec.s_value, spec.mu)
        return int(np.argmin(scores))
    if spec.kind == "das-rs":
        scores = score_all(spec.model, spec.reference, belief, spec.s_value, spec.mu)
        scores = np.where(spec.support_mask, scores, np.inf)
        return int(np.argmin(scores))
    if spec.kind == "chernoff-det":
        log_bar = uniform_prior_log_posterior(belief, spec.model)
        i = spec.reference
        alts = np.concatenate([log_bar[:i], log_bar[i + 1:]])
        k = int(np.argmax(alts))
        return int(spec.chernoff_u[k])
    if spec.kind == "symmetric":
        log_bar = uniform_prior_log_posterior(belief, spec.model)
        i_hat = int(np.argmax(log_bar))
        return select_experiment(spec.inner[i_hat], belief, rng)
    raise ValueError(f"unknown strategy kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# Threshold schedules and inference rules
# ---------------------------------------------------------------------------

def threshold_asymmetric(N: int, game: GameSolution, epsilon: float,
                         M: int, B: float) -> float:
    """Theory threshold N D* - s N B^2 / 2 - ln(M/eps)/s with the
    balanced tilt s.  May be negative at small N; that is legal."""
    s = s_schedule(N, M, epsilon, B)
    return N * game.value - s * N * B * B / 2.0 - math.log(M / epsilon) / s


def default_n_prime(N: int, epsilon: float, b: float | None = None,
                    K: float | None = None) -> int:
    """Settling-time allowance for the composite strategy.

    When the concentration constants (b, K) of the maximum-likelihood
    estimate are supplied, use ceil(-(1/b) ln(eps/(2K))); they are rarely
    known, so the default is ceil(sqrt(N)), which is o(N) and preserves
    the threshold's asymptotic rate.
    """
    if (b is None) != (K is None):
        raise ValueError("supply both b and K or neither")
    if b is not None:
        if b <= 0 or K <= 0:
            raise ValueError("b and K must be positive")
        return max(1, math.ceil(-math.log(epsilon / (2.0 * K)) / b))
    return max(1, math.ceil(math.sqrt(N)))


def threshold_symmetric(N: int, i: int, game: GameSolution, epsilon: float,
                        M: int, B: float, n_prime: int, zeta: float,
                        prior_confidence: float) -> float:
    """Per-hypothesis threshold for the symmetric rule:

        max{ zeta - C_i(prior),
             N'' D*(i) - s N'' B^2/2 - ln(2M/eps)/s },   N'' = N - n_prime + 1

    with the tilt balanced for the effective horizon N'' and slack
    eps/2.  Always exceeds -C_i(prior), so at most one hypothesis can
    clear its threshold.
    """
    if not 1 <= n_prime <= N:
        raise ValueError(f"n_prime must be in [1, N], got {n_prime}")
    if zeta <= 0:
        raise ValueError("zeta must be positive")
    n2 = N - n_prime + 1
    s = s_schedule(n2, M, epsilon / 2.0, B)
    branch = n2 * game.value - s * n2 * B * B / 2.0 - math.log(2.0 * M / epsilon) / s
    return max(zeta - prior_confidence, branch)


RULE_KINDS = ("asymmetric", "symmetric", "empirical")


@dataclass(frozen=True)
class InferenceRule:
    """Threshold rule: declare i when the confidence gained since the
    prior reaches thresholds[i] (inclusive); otherwise abstain."""

    kind: str
    thresholds: dict[int, float]
    epsilon: float

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ValueError(f"unknown inference kind {self.kind!r}")
        if not self.thresholds:
            raise ValueError("thresholds must cover at least one hypothesis")


def asymmetric_rule(model: HypothesisModel, game: GameSolution, N: int,
                    epsilon: float) -> InferenceRule:
    theta = threshold_asymmetric(N, game, epsilon, model.num_hypotheses,
                                 model.llr_bound)
    return InferenceRule("asymmetric", {game.reference: theta}, epsilon)


def empirical_rule(reference: int, theta: float, epsilon: float) -> InferenceRule:
    """Threshold found by calibration rather than by the theory bound."""
    return InferenceRule("empirical", {reference: theta}, epsilon)


def symmetric_rule(model: HypothesisModel, games: dict[int, GameSolution],
                   N: int, epsilon: float, zeta: float = 0.01,
                   n_prime: int | None = None, b: float | None = None,
                   K: float | None = None) -> InferenceRule:
    if n_prime is None:
        n_prime = default_n_prime(N, epsilon, b=b, K=K)
    prior = prior_belief(model)
    thresholds = {}
    for i in range(model.num_hypotheses):
        c1 = confidence(prior, i)
        thresholds[i] = threshold_symmetric(
            N, i, games[i], epsilon, model.num_hypotheses, model.llr_bound,
            n_prime, zeta, c1)
        if thresholds[i] <= -c1:
            raise ValueError("symmetric threshold fails the uniqueness bound")
    return InferenceRule("symmetric", thresholds, epsilon)


def infer(final_belief: Belief, prior: Belief, rule: InferenceRule) -> int | None:
    """Apply the rule to the run's final belief.  Returns the declared
    hypothesis index, or None for the inconclusive declaration."""
    cleared = [i for i, theta in rule.thresholds.items()
               if confidence(final_belief, i) - confidence(prior, i) >= theta]
    if rule.kind in ("asymmetric", "empirical"):
        return cleared[0] if cleared else None
    if len(cleared) > 1:
        raise ValueError(
            f"hypotheses {cleared} both cleared their symmetric thresholds; "
            "thresholds are misconfigured (must exceed -C_i(prior))")
    return cleared[0] if cleared else None
