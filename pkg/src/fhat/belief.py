"""Log-space posterior beliefs and per-trajectory likelihood-ratio state.

Everything here stays in log space; confidences routinely reach hundreds
of nats at long horizons and must never be exponentiated raw.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .model import HypothesisModel, ModelError, llr_table
from .numerics import logsumexp, log_normalize

NORM_TOL = 1e-10


@dataclass(frozen=True)
class Belief:
    """A distribution over hypotheses, stored as normalized log masses."""

    log_prob: np.ndarray

    def __post_init__(self):
        lp = np.asarray(self.log_prob, dtype=float)
        object.__setattr__(self, "log_prob", lp)
        lp.setflags(write=False)

    @classmethod
    def from_probs(cls, probs) -> "Belief":
        p = np.asarray(probs, dtype=float)
        if np.any(p < 0):
            raise ValueError("negative probability in belief")
        with np.errstate(divide="ignore"):
            return cls(log_normalize(np.log(p)))

    @classmethod
    def uniform(cls, M: int) -> "Belief":
        return cls(np.full(M, -np.log(M)))

    def probs(self) -> np.ndarray:
        return np.exp(self.log_prob)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(logsumexp(self.log_prob)) <= tol


def prior_belief(model: HypothesisModel) -> Belief:
    return Belief(log_normalize(model.log_prior.copy()))


def update_belief(b: Belief, model: HypothesisModel, u: int, y: int) -> Belief:
    """One Bayes step: fold in the likelihood of observing y under
    experiment u and renormalize in log space."""
    if not model.support[u, y]:
        raise ModelError(
            f"observation {model.observations[y]} outside the support of "
            f"experiment {model.experiments[u]}")
    lp = b.log_prob + model.log_kernel[:, u, y]
    return Belief(log_normalize(lp))


def confidence(b: Belief, i: int) -> float:
    """Log odds log(rho(i) / (1 - rho(i))), computed as
    log_prob[i] - logsumexp(log_prob[j != i])."""
    lp = b.log_prob
    alts = np.concatenate([lp[:i], lp[i + 1:]])
    denom = logsumexp(alts)
    if not np.isfinite(lp[i]) or not np.isfinite(denom):
        raise ValueError("confidence undefined for a degenerate belief")
    return float(lp[i] - denom)


def tilde_log(b: Belief, i: int) -> np.ndarray:
    """Log of the renormalized belief over alternates j != i
    (ascending j), i.e. log(rho(j) / (1 - rho(i)))."""
    lp = b.log_prob
    alts = np.concatenate([lp[:i], lp[i + 1:]])
    denom = logsumexp(alts)
    if not np.isfinite(denom):
        raise ValueError("tilde belief undefined when rho(i) = 1")
    return alts - denom


def tilde_belief(b: Belief, i: int) -> np.ndarray:
    """Conditional distribution over the alternates of i."""
    return np.exp(tilde_log(b, i))


def uniform_prior_log_posterior(b: Belief, model: HypothesisModel) -> np.ndarray:
    """Log posterior the agent would hold after the same history had the
    prior been uniform: divide out the actual prior and renormalize."""
    return log_normalize(b.log_prob - model.log_prior)


@dataclass(frozen=True)
class Trajectory:
    """One run's history plus derived state for a fixed reference
    hypothesis: the current belief, the total log-likelihood ratios
    z[k] against each alternate, and their beta-weighted sum z_bar
    (tracked only when beta weights are supplied)."""

    model: HypothesisModel
    reference: int
    belief: Belief
    z: np.ndarray                       # (M-1,) over alternates, ascending j
    history: tuple = ()
    beta_star: np.ndarray | None = None
    z_bar: float | None = None
    _llr: np.ndarray = field(repr=False, default=None)   # (M-1, U, Y) lookup

    def __post_init__(self):
        if self._llr is None:
            object.__setattr__(self, "_llr", llr_table(self.model, self.reference))

    @property
    def step_count(self) -> int:
        return len(self.history)

    def alternates(self) -> tuple[int, ...]:
        return self.model.alternates(self.reference)


def new_trajectory(model: HypothesisModel, reference: int,
                   beta_star=None) -> Trajectory:
    M = model.num_hypotheses
    if not 0 <= reference < M:
        raise ValueError(f"reference hypothesis {reference} out of range")
    beta = None if beta_star is None else np.asarray(beta_star, dtype=float)
    return Trajectory(
        model=model,
        reference=reference,
        belief=prior_belief(model),
        z=np.zeros(M - 1),
        beta_star=beta,
        z_bar=0.0 if beta is not None else None,
    )


def step_trajectory(t: Trajectory, u: int, y: int) -> Trajectory:
    """Append one (experiment, observation) pair: advance the belief,
    the per-alternate total LLRs, and z_bar when weights are present."""
    model = t.model
    if not model.support[u, y]:
        raise ModelError(
            f"observation {model.observations[y]} outside the support of "
            f"experiment {model.experiments[u]}")
    z = t.z + t._llr[:, u, y]
    z_bar = None if t.beta_star is None else float(np.dot(t.beta_star, z))
    return replace(
        t,
        belief=update_belief(t.belief, model, u, y),
        z=z,
        z_bar=z_bar,
        history=t.history + ((u, y),),
    )


def confidence_increment(t: Trajectory) -> float:
    """Total confidence gained since the prior, computed from the LLR
    state: -logsumexp_j(log tilde_rho_1(j) - Z_n(j)).

    Equals confidence(t.belief, i) - confidence(prior, i) exactly (an
    algebraic identity, enforced by tests)."""
    prior = prior_belief(t.model)
    lt1 = tilde_log(prior, t.reference)
    return float(-logsumexp(lt1 - t.z))


def decomposition_terms(t: Trajectory, beta_star) -> tuple[float, float, float]:
    """Split the confidence increment into cross-entropy bookends around
    the weighted LLR sum: returns (H(beta, tilde_rho_end), z_bar,
    H(beta, tilde_rho_start)) with

        increment = -H_end + z_bar + H_start.

    Both cross-entropies are nonnegative.
    """
    beta = np.asarray(beta_star, dtype=float)
    if beta.shape != t.z.shape or np.any(beta < 0) or abs(beta.sum() - 1.0) > 1e-9:
        raise ValueError("beta_star must be a distribution over the alternates")
    prior = prior_belief(t.model)
    h_start = float(-np.dot(beta, tilde_log(prior, t.reference)))
    h_end = float(-np.dot(beta, tilde_log(t.belief, t.reference)))
    z_bar = float(np.dot(beta, t.z))
    return h_end, z_bar, h_start


def recompute_belief(t: Trajectory) -> Belief:
    """Replay the history through Bayes updates (consistency checks)."""
    b = prior_belief(t.model)
    for u, y in t.history:
        b = update_belief(b, t.model, u, y)
    return b


def format_trajectory_dump(t: Trajectory, sep: str = "\t") -> str:
    """Debug dump: one line per step with experiment and observation
    labels, the running confidence, and the Z values."""
    model = t.model
    lines = []
    replay = new_trajectory(model, t.reference, beta_star=t.beta_star)
    for n, (u, y) in enumerate(t.history, start=1):
        replay = step_trajectory(replay, u, y)
        cells = [str(n), model.experiments[u], model.observations[y],
                 f"{confidence(replay.belief, t.reference):.9g}"]
        cells += [f"{z:.9g}" for z in replay.z]
        lines.append(sep.join(cells))
    return "\n".join(lines)
