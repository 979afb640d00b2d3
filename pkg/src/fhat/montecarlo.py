"""Monte Carlo and exact-enumeration evaluation of (strategy, rule) pairs.

The simulation engine is vectorized over trials and organized in
fixed-size chunks of 8192 trials.  Chunk c of the stream (seed, purpose,
hypothesis) draws its randomness from an independent counter-based
generator keyed by exactly those integers, so results are bit-identical
for any worker count and any trial budget that covers the same trials.

phi is reported through two channels: the plain declaration frequency
under the alternate mixture (sanity channel, useless once phi is tiny)
and the log-sum-exp estimator run under the reference measure, which
targets phi exactly for deterministic threshold rules and stays accurate
down to e^{-hundreds}.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bounds_mod
from .belief import (Belief, confidence, new_trajectory, prior_belief,
                     step_trajectory)
from .model import HypothesisModel, llr_table
from .numerics import (largest_remainder_allocation, log_normalize,
                       logsumexp, nats_to_db)
from .strategy import (InferenceRule, StrategySpec, build_strategy,
                       default_epsilon, empirical_rule, infer,
                       select_experiment, symmetric_rule)

CHUNK = 8192
ENUM_STEP_CAP = 10
JACKKNIFE_BATCHES = 100

# Stream purposes: estimation, threshold calibration, alternate mixture.
PURPOSE_ESTIMATE = 0
PURPOSE_CALIBRATE = 1
PURPOSE_MIXTURE = 2


# ---------------------------------------------------------------------------
# Vectorized trial engine
# ---------------------------------------------------------------------------

def _chunk_generator(master_seed: int, purpose: int, hyp: int, chunk: int):
    ss = np.random.SeedSequence((int(master_seed), int(purpose), int(hyp), int(chunk)))
    return np.random.Generator(np.random.Philox(ss))


def _inv_cdf_batch(cum_rows: np.ndarray, draws: np.ndarray) -> np.ndarray:
    """Index = #{cum <= r}, clipped; matches the scalar sampling path."""
    idx = (draws[:, None] >= cum_rows).sum(axis=1)
    return np.minimum(idx, cum_rows.shape[1] - 1)


def _select_batch(spec: StrategySpec, lb: np.ndarray, exp_draws: np.ndarray) -> np.ndarray:
    """Vectorized select_experiment on (possibly unnormalized) log
    beliefs; identical tie-breaking (argmin/argmax take the first)."""
    model = spec.model
    if spec.kind == "ors":
        cum = np.cumsum(spec.sample_alpha)
        return _inv_cdf_batch(np.broadcast_to(cum, (lb.shape[0], cum.size)), exp_draws)
    if spec.kind in ("das", "das-rs"):
        alts = list(model.alternates(spec.reference))
        w = spec.s_value * lb[:, alts]
        w = np.exp(w - logsumexp(w, axis=1, keepdims=True))
        scores = w @ spec.mu.T
        if spec.kind == "das-rs":
            scores = np.where(spec.support_mask[None, :], scores, np.inf)
        return np.argmin(scores, axis=1)
    if spec.kind == "chernoff-det":
        lbar = lb - model.log_prior[None, :]
        alts = list(model.alternates(spec.reference))
        k = np.argmax(lbar[:, alts], axis=1)
        return spec.chernoff_u[k]
    if spec.kind == "symmetric":
        lbar = lb - model.log_prior[None, :]
        i_hat = np.argmax(lbar, axis=1)
        u = np.zeros(lb.shape[0], dtype=np.int64)
        for i in range(model.num_hypotheses):
            mask = i_hat == i
            if mask.any():
                u[mask] = _select_batch(spec.inner[i], lb[mask], exp_draws[mask])
        return u
    raise ValueError(f"unknown strategy kind {spec.kind!r}")


def _confidence_increments(model: HypothesisModel, lb: np.ndarray,
                           refs) -> np.ndarray:
    """C_i(final) - C_i(prior) for each reference, from unnormalized
    final log beliefs (the normalization shift cancels)."""
    prior = prior_belief(model)
    out = np.empty((lb.shape[0], len(refs)))
    for col, i in enumerate(refs):
        alts = list(model.alternates(i))
        out[:, col] = (lb[:, i] - logsumexp(lb[:, alts], axis=1)) - confidence(prior, i)
    return out


def _simulate_chunk(model: HypothesisModel, spec: StrategySpec, N: int,
                    true_hyp: int, master_seed: int, purpose: int,
                    chunk_idx: int, n_rows: int, refs: tuple,
                    zbar_weights: np.ndarray | None):
    """Simulate one full chunk and return the first n_rows results."""
    gen = _chunk_generator(master_seed, purpose, true_hyp, chunk_idx)
    T = CHUNK
    lb = np.tile(model.log_prior, (T, 1))
    cumk = np.cumsum(model.kernel[true_hyp], axis=1)       # (U, Y)
    track_z = zbar_weights is not None
    if track_z:
        ref0 = refs[0]
        llr = llr_table(model, ref0)                        # (K, U, Y)
        z = np.zeros((T, llr.shape[0]))
    for _ in range(N):
        exp_draws = gen.random(T)
        obs_draws = gen.random(T)
        u = _select_batch(spec, lb, exp_draws)
        y = _inv_cdf_batch(cumk[u], obs_draws)
        lb += model.log_kernel[:, u, y].T
        if track_z:
            z += llr[:, u, y].T
    c_inc = _confidence_increments(model, lb, refs)[:n_rows]
    zbar = (z[:n_rows] @ zbar_weights) if track_z else None
    return c_inc, zbar


def _chunk_task(args):
    return _simulate_chunk(*args)


def simulate_measure(model: HypothesisModel, spec: StrategySpec, N: int,
                     true_hyp: int, trials: int, master_seed: int,
                     purpose: int = PURPOSE_ESTIMATE, refs: tuple = (),
                     zbar_weights=None, workers: int = 0):
    """Run `trials` trials under X = true_hyp.

    Returns (c_inc, zbar): confidence increments per requested reference
    hypothesis, and the weighted total-LLR samples when `zbar_weights`
    is given (weights over the alternates of refs[0]).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    refs = tuple(refs) if refs else (true_hyp,)
    w = None if zbar_weights is None else np.asarray(zbar_weights, dtype=float)
    n_chunks = (trials + CHUNK - 1) // CHUNK
    tasks = []
    for c in range(n_chunks):
        rows = min(CHUNK, trials - c * CHUNK)
        tasks.append((model, spec, N, true_hyp, master_seed, purpose, c, rows, refs, w))
    if workers and workers > 1 and n_chunks > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_chunk_task, tasks))
    else:
        results = [_chunk_task(t) for t in tasks]
    c_inc = np.concatenate([r[0] for r in results], axis=0)
    zbar = None
    if w is not None:
        zbar = np.concatenate([r[1] for r in results], axis=0)
    return c_inc, zbar


def run_trial(model: HypothesisModel, spec: StrategySpec, rule: InferenceRule,
              N: int, true_hypothesis: int, seed: int,
              purpose: int = PURPOSE_ESTIMATE, trial_index: int = 0,
              beta_star=None):
    """Scalar reference path for a single trial.

    Replays exactly the randomness AND the selection arithmetic that the
    vectorized engine assigns to trial `trial_index` of the given
    stream: selection runs on the same raw log-likelihood state, so even
    knife-edge argmax ties resolve identically.  The returned trajectory
    is bitwise-reproducible across runs and worker counts.
    """
    chunk_idx, row = divmod(trial_index, CHUNK)
    gen = _chunk_generator(seed, purpose, true_hypothesis, chunk_idx)
    ref = min(rule.thresholds) if rule.thresholds else (spec.reference or 0)
    traj = new_trajectory(model, ref, beta_star=beta_star)
    lb = model.log_prior.copy()[None, :]          # engine's raw state
    cumk = np.cumsum(model.kernel[true_hypothesis], axis=1)
    for _ in range(N):
        exp_draws = gen.random(CHUNK)
        obs_draws = gen.random(CHUNK)
        u = int(_select_batch(spec, lb, exp_draws[row:row + 1])[0])
        y = int(min(int((cumk[u] <= obs_draws[row]).sum()), model.num_observations - 1))
        lb = lb + model.log_kernel[:, u, y][None, :]
        traj = step_trajectory(traj, u, y)
    decision = infer(traj.belief, prior_belief(model), rule)
    return traj, decision


# ---------------------------------------------------------------------------
# Decisions and estimators
# ---------------------------------------------------------------------------

def decisions_from_increments(c_inc: np.ndarray, refs: tuple,
                              rule: InferenceRule) -> np.ndarray:
    """Vectorized inference: -1 encodes the inconclusive declaration."""
    T = c_inc.shape[0]
    flags = np.zeros((T, len(refs)), dtype=bool)
    for col, i in enumerate(refs):
        if i in rule.thresholds:
            flags[:, col] = c_inc[:, col] >= rule.thresholds[i]
    counts = flags.sum(axis=1)
    if rule.kind == "symmetric" and np.any(counts > 1):
        raise ValueError("two hypotheses cleared their symmetric thresholds")
    dec = np.full(T, -1, dtype=np.int64)
    hit = counts >= 1
    dec[hit] = np.asarray(refs)[np.argmax(flags[hit], axis=1)]
    return dec


@dataclass(frozen=True)
class LsePhiEstimate:
    """ln(1/phi_hat) from the log-sum-exp estimator under X = i."""

    log_inv_phi: float
    se: float
    accepted: int
    trials: int
    is_lower_bound: bool = False     # no accepted trial: report >= ln T


def estimate_phi_lse(c_inc: np.ndarray, accepted: np.ndarray,
                     batches: int = JACKKNIFE_BATCHES) -> LsePhiEstimate:
    """phi = E_i[exp(-(C_inc - ln 1_accept))]; estimate ln(1/phi) as
    ln T - logsumexp(-C_inc over accepted trials).  Declined trials
    contribute exp(-inf) = 0.  SE by jackknife over equal trial batches.
    """
    c_inc = np.asarray(c_inc, dtype=float).ravel()
    accepted = np.asarray(accepted, dtype=bool).ravel()
    T = c_inc.size
    n_acc = int(accepted.sum())
    if n_acc == 0:
        return LsePhiEstimate(math.log(T), math.nan, 0, T, is_lower_bound=True)
    neg = np.where(accepted, -c_inc, -np.inf)
    shift = float(neg.max())
    terms = np.exp(neg - shift)
    total = float(terms.sum())
    est = math.log(T) - (shift + math.log(total))

    batches = min(batches, T)
    edges = np.linspace(0, T, batches + 1).astype(int)
    loo = []
    for b in range(batches):
        s_b = float(terms[edges[b]:edges[b + 1]].sum())
        t_b = edges[b + 1] - edges[b]
        rest = total - s_b
        if rest <= 0.0 or t_b == 0 or t_b == T:
            continue
        loo.append(math.log(T - t_b) - (shift + math.log(rest)))
    if len(loo) >= 2:
        loo = np.asarray(loo)
        B = loo.size
        se = math.sqrt((B - 1) / B * float(np.sum((loo - loo.mean()) ** 2)))
    else:
        se = math.nan
    return LsePhiEstimate(est, se, n_acc, T)


@dataclass
class SimulationConfig:
    """Everything needed to reproduce one evaluation run."""

    model: HypothesisModel
    spec: StrategySpec
    rule: InferenceRule
    horizon: int
    trials: int
    seed: int
    workers: int = 0


@dataclass
class SimulationReport:
    """Per-hypothesis estimates with standard errors.

    phi_hat is the plain mixture-frequency channel; lse[i] the log-sum-
    exp channel (primary for small phi).  gamma_hat combines the plain
    channel, gamma_hat_lse the log-sum-exp channel.
    """

    horizon: int
    trials: int
    seed: int
    psi_hat: dict = field(default_factory=dict)
    psi_se: dict = field(default_factory=dict)
    phi_hat: dict = field(default_factory=dict)
    phi_se: dict = field(default_factory=dict)
    lse: dict = field(default_factory=dict)
    gamma_hat: float = math.nan
    gamma_hat_lse: float = math.nan
    gamma_lse_se: float = math.nan
    histogram: dict = field(default_factory=dict)
    wall_clock: float = math.nan


def _histogram(model: HypothesisModel, decisions: np.ndarray) -> dict:
    hist = {}
    for i, name in enumerate(model.hypotheses):
        hist[name] = int(np.sum(decisions == i))
    hist["inconclusive"] = int(np.sum(decisions == -1))
    return hist


def estimate(config: SimulationConfig) -> SimulationReport:
    """Monte Carlo estimates of psi, phi (both channels) and gamma.

    psi_hat(i) and the log-sum-exp channel come from trials under X = i;
    the plain phi_hat(i) from trials under the alternate mixture with
    weights prior(j)/(1 - prior(i)), allocated by largest remainder.
    """
    t0 = time.perf_counter()
    model, rule = config.model, config.rule
    refs = tuple(sorted(rule.thresholds))
    T = config.trials
    report = SimulationReport(horizon=config.horizon, trials=T, seed=config.seed)
    prior = model.prior

    if rule.kind == "symmetric":
        # One batch per true hypothesis serves psi, the mixture phis and
        # the log-sum-exp channel simultaneously.
        dec_by_hyp, inc_by_hyp = {}, {}
        for h in range(model.num_hypotheses):
            c_inc, _ = simulate_measure(model, config.spec, config.horizon, h,
                                        T, config.seed, PURPOSE_ESTIMATE,
                                        refs=refs, workers=config.workers)
            dec = decisions_from_increments(c_inc, refs, rule)
            dec_by_hyp[h], inc_by_hyp[h] = dec, c_inc
            report.histogram[model.hypotheses[h]] = _histogram(model, dec)
        for i in refs:
            psi = float(np.mean(dec_by_hyp[i] == i))
            report.psi_hat[i] = psi
            report.psi_se[i] = math.sqrt(psi * (1 - psi) / T)
            var = 0.0
            phi = 0.0
            for j in range(model.num_hypotheses):
                if j == i:
                    continue
                w = prior[j] / (1.0 - prior[i])
                p = float(np.mean(dec_by_hyp[j] == i))
                phi += w * p
                var += (w ** 2) * p * (1 - p) / T
            report.phi_hat[i] = phi
            report.phi_se[i] = math.sqrt(var)
            col = refs.index(i)
            report.lse[i] = estimate_phi_lse(inc_by_hyp[i][:, col],
                                             dec_by_hyp[i] == i)
    else:
        (i,) = refs
        c_inc, _ = simulate_measure(model, config.spec, config.horizon, i, T,
                                    config.seed, PURPOSE_ESTIMATE, refs=refs,
                                    workers=config.workers)
        dec = decisions_from_increments(c_inc, refs, rule)
        psi = float(np.mean(dec == i))
        report.psi_hat[i] = psi
        report.psi_se[i] = math.sqrt(psi * (1 - psi) / T)
        report.lse[i] = estimate_phi_lse(c_inc[:, 0], dec == i)
        report.histogram[model.hypotheses[i]] = _histogram(model, dec)

        alts = model.alternates(i)
        weights = [prior[j] / (1.0 - prior[i]) for j in alts]
        alloc = largest_remainder_allocation(weights, T)
        hits = 0
        for j, t_j in zip(alts, alloc):
            if t_j == 0:
                continue
            cj, _ = simulate_measure(model, config.spec, config.horizon, j,
                                     int(t_j), config.seed, PURPOSE_MIXTURE,
                                     refs=refs, workers=config.workers)
            dj = decisions_from_increments(cj, refs, rule)
            hits += int(np.sum(dj == i))
        phi = hits / T
        report.phi_hat[i] = phi
        report.phi_se[i] = math.sqrt(phi * (1 - phi) / T)

    gamma = sum(report.phi_hat.get(i, 0.0) * (1.0 - prior[i]) for i in refs)
    report.gamma_hat = gamma
    if all(i in report.lse for i in refs):
        g = 0.0
        var = 0.0
        for i in refs:
            est = report.lse[i]
            phi_i = 0.0 if est.is_lower_bound else math.exp(-est.log_inv_phi)
            g += (1.0 - prior[i]) * phi_i
            if not est.is_lower_bound and np.isfinite(est.se):
                var += ((1.0 - prior[i]) * phi_i * est.se) ** 2
        report.gamma_hat_lse = g
        report.gamma_lse_se = math.sqrt(var)
    report.wall_clock = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# Exact enumeration (small-horizon oracle)
# ---------------------------------------------------------------------------

class _ZeroRng:
    """Stands in for the rng of deterministic strategies; a point-mass
    sampler fed 0.0 lands on its single positive-mass experiment."""

    def random(self):
        return 0.0


def enumerate_paths(model: HypothesisModel, spec: StrategySpec, N: int,
                    step_cap: int = ENUM_STEP_CAP):
    """Walk the complete observation tree of a deterministic strategy.

    Yields (experiments, observations, loglik) per leaf, where loglik[h]
    is the log path probability under hypothesis h.  Exhaustive: the
    per-hypothesis leaf masses each sum to 1.
    """
    if N > step_cap:
        raise ValueError(f"horizon {N} above enumeration cap {step_cap}")
    if not spec.is_deterministic():
        raise ValueError("exact enumeration needs a deterministic strategy")
    rng = _ZeroRng()

    def rec(loglik, exps, obs, depth):
        if depth == N:
            yield exps, obs, loglik
            return
        b = Belief(log_normalize(model.log_prior + loglik))
        u = select_experiment(spec, b, rng)
        for y in model.support_indices(u):
            yield from rec(loglik + model.log_kernel[:, u, y],
                           exps + (u,), obs + (int(y),), depth + 1)

    yield from rec(np.zeros(model.num_hypotheses), (), (), 0)


@dataclass(frozen=True)
class ExactReport:
    """Exact psi/phi per hypothesis and overall gamma at small N."""

    psi: dict
    phi: dict
    gamma: float
    leaves: int


def enumerate_exact(model: HypothesisModel, spec: StrategySpec,
                    rule: InferenceRule, N: int,
                    step_cap: int = ENUM_STEP_CAP) -> ExactReport:
    """Exact (psi_N, phi_N, gamma_N) by summing path probabilities over
    the full observation tree (probabilities exact to 64-bit rounding)."""
    refs = tuple(sorted(rule.thresholds))
    prior = prior_belief(model)
    prior_conf = {i: confidence(prior, i) for i in refs}
    M = model.num_hypotheses
    declare_mass = {i: np.zeros(M) for i in refs}   # P_h[declare i] per h
    total_mass = np.zeros(M)
    leaves = 0
    for _, _, loglik in enumerate_paths(model, spec, N, step_cap):
        leaves += 1
        path_p = np.exp(loglik)
        total_mass += path_p
        lb = model.log_prior + loglik
        cleared = []
        for i in refs:
            alts = list(model.alternates(i))
            inc = (lb[i] - logsumexp(lb[alts])) - prior_conf[i]
            if inc >= rule.thresholds[i]:
                cleared.append(i)
        if rule.kind == "symmetric" and len(cleared) > 1:
            raise ValueError("two hypotheses cleared their symmetric thresholds")
        if cleared:
            declare_mass[cleared[0]] += path_p
    if np.any(np.abs(total_mass - 1.0) > 1e-9):
        raise RuntimeError("enumeration did not cover the observation tree")

    psi, phi = {}, {}
    for i in refs:
        psi[i] = float(declare_mass[i][i])
        w = np.array([model.prior[j] / (1.0 - model.prior[i]) if j != i else 0.0
                      for j in range(M)])
        phi[i] = float(np.dot(w, declare_mass[i]))
    gamma = sum(phi[i] * (1.0 - model.prior[i]) for i in refs)
    return ExactReport(psi=psi, phi=phi, gamma=gamma, leaves=leaves)


# ---------------------------------------------------------------------------
# Threshold calibration and the sweep driver
# ---------------------------------------------------------------------------

def best_threshold_search(model: HypothesisModel, spec: StrategySpec, N: int,
                          epsilon: float, trials: int, tol: float = 1e-6,
                          seed: int = 0, workers: int = 0,
                          c_inc: np.ndarray | None = None) -> float:
    """Largest threshold theta with psi_hat >= 1 - epsilon.

    Bisection over theta; every probe reuses the same calibration batch
    (common random numbers), so psi_hat(theta) is monotone and the
    search is exact up to `tol`.  Increments are bounded by N*B, hence
    the bracket below is always feasible at its lower end.
    """
    i = spec.reference
    if c_inc is None:
        c_inc, _ = simulate_measure(model, spec, N, i, trials, seed,
                                    PURPOSE_CALIBRATE, refs=(i,),
                                    workers=workers)
    inc = np.sort(np.asarray(c_inc).ravel())
    bound = N * model.llr_bound + 1.0
    lo, hi = -bound, bound
    need = 1.0 - epsilon

    def psi_at(theta):
        # fraction of increments >= theta
        return 1.0 - np.searchsorted(inc, theta, side="left") / inc.size

    if psi_at(lo) < need:
        raise RuntimeError("calibration failed at the lower bracket; "
                           "trial budget too small to certify epsilon")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if psi_at(mid) >= need:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass
class SweepRow:
    """One CSV row of a figure sweep."""

    strategy: str
    N: int
    epsilon: float
    theta: float
    psi_hat: float
    psi_se: float
    log_inv_phi: float
    log_inv_phi_se: float
    phi_db: float
    gamma_hat: float
    weak_bound: float      # rate bound, nats per step
    strong_bound: float    # absolute bound, nats
    seed: int


CSV_COLUMNS = ("strategy", "N", "epsilon", "theta", "psi_hat", "psi_se",
               "log_inv_phi", "log_inv_phi_se", "phi_db", "gamma_hat",
               "weak_bound", "strong_bound", "seed")


def fmt9(x) -> str:
    """Floats at 9 significant digits for CSV cells."""
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def rows_to_csv(rows) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(",".join(fmt9(getattr(r, c)) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def sweep(model: HypothesisModel, kinds, reference: int, horizons,
          trials: int, seed: int, epsilon_fn=default_epsilon,
          strong: str = "none", nu: float | None = None,
          workers: int = 0, inner_kind: str = "das") -> list[SweepRow]:
    """Evaluate each (strategy kind, horizon) cell.

    Asymmetric kinds: calibrate the threshold empirically on a dedicated
    batch, then estimate psi and ln(1/phi) (log-sum-exp channel) on a
    fresh batch; bound columns use the weak rate bound and the selected
    strong channel ("binary" needs `nu`, "empirical" reuses the
    estimation batch's weighted-LLR samples, "none" leaves it infinite).

    The symmetric composite row reports min_i psi_hat, gamma via the
    log-sum-exp channel and ln(1/gamma) in the log_inv_phi column.
    """
    if strong not in ("none", "binary", "empirical"):
        raise ValueError(f"unknown strong-bound channel {strong!r}")
    if strong == "binary" and nu is None:
        raise ValueError("the binary closed-form strong bound needs nu")
    rows = []
    for kind in kinds:
        for N in horizons:
            eps = epsilon_fn(N)
            if kind == "symmetric":
                spec = build_strategy(model, kind, N, epsilon=eps,
                                      inner_kind=inner_kind)
                games = {i: spec.inner[i].game for i in range(model.num_hypotheses)}
                rule = symmetric_rule(model, games, N, eps)
                rep = estimate(SimulationConfig(model, spec, rule, N, trials,
                                                seed, workers))
                gamma = rep.gamma_hat_lse
                log_inv = -math.log(gamma) if gamma > 0 else math.inf
                rel_se = (rep.gamma_lse_se / gamma) if gamma > 0 else math.nan
                weak = min(bounds_mod.weak_converse(games[i], model, N, eps)
                           for i in games)
                rows.append(SweepRow(
                    strategy=kind, N=N, epsilon=eps,
                    theta=min(rule.thresholds.values()),
                    psi_hat=min(rep.psi_hat.values()),
                    psi_se=max(rep.psi_se.values()),
                    log_inv_phi=log_inv, log_inv_phi_se=rel_se,
                    phi_db=float(nats_to_db(log_inv)),
                    gamma_hat=gamma, weak_bound=weak, strong_bound=math.inf,
                    seed=seed))
                continue

            spec = build_strategy(model, kind, N, reference=reference,
                                  epsilon=eps)
            theta = best_threshold_search(model, spec, N, eps, trials,
                                          seed=seed, workers=workers)
            rule = empirical_rule(reference, theta, eps)
            want_z = strong == "empirical"
            zw = spec.game.beta_star if want_z else None
            c_inc, zbar = simulate_measure(model, spec, N, reference, trials,
                                           seed, PURPOSE_ESTIMATE,
                                           refs=(reference,), zbar_weights=zw,
                                           workers=workers)
            dec = decisions_from_increments(c_inc, (reference,), rule)
            psi = float(np.mean(dec == reference))
            est = estimate_phi_lse(c_inc[:, 0], dec == reference)
            weak = bounds_mod.weak_converse(spec.game, model, N, eps)
            if strong == "binary":
                strong_abs = bounds_mod.strong_bound_binary_example(N, nu, eps)
            elif strong == "empirical":
                h1 = bounds_mod.cross_entropy_start(model, spec.game)
                _, strong_abs = bounds_mod.strong_converse_sweep(zbar, h1, eps)
            else:
                strong_abs = math.inf
            phi_lse = math.exp(-est.log_inv_phi) if not est.is_lower_bound else 0.0
            rows.append(SweepRow(
                strategy=kind, N=N, epsilon=eps, theta=theta, psi_hat=psi,
                psi_se=math.sqrt(psi * (1 - psi) / trials),
                log_inv_phi=est.log_inv_phi, log_inv_phi_se=est.se,
                phi_db=float(nats_to_db(est.log_inv_phi)),
                gamma_hat=(1.0 - model.prior[reference]) * phi_lse,
                weak_bound=weak, strong_bound=strong_abs, seed=seed))
    return rows
