"""Finite active-hypothesis-testing models.

A model is a finite set of hypotheses, a finite set of experiments, and
for each (hypothesis, experiment) pair a distribution over a finite
observation alphabet.  All distributions for a given experiment must
share the same support, which keeps every log-likelihood ratio finite.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass, field

import numpy as np
import yaml


ROW_SUM_TOL = 1e-12


class ModelError(ValueError):
    """Raised when a model document fails parsing or validation."""


@dataclass(frozen=True)
class HypothesisModel:
    """Validated model with derived log tables and LLR bound.

    kernel[i, u, y] is the probability of observing y when experiment u
    is performed and hypothesis i is true.  Zeros must be explicit: the
    support is taken to be exactly the strictly positive entries.
    """

    hypotheses: tuple[str, ...]
    experiments: tuple[str, ...]
    observations: tuple[str, ...]
    kernel: np.ndarray          # (M, U, Y)
    prior: np.ndarray           # (M,)
    support: np.ndarray         # (U, Y) bool, shared across hypotheses
    llr_bound: float            # B, in nats
    log_kernel: np.ndarray = field(repr=False, default=None)
    log_prior: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        with np.errstate(divide="ignore"):
            logk = np.where(self.kernel > 0, np.log(np.where(self.kernel > 0, self.kernel, 1.0)), -np.inf)
            logp = np.log(self.prior)
        object.__setattr__(self, "log_kernel", logk)
        object.__setattr__(self, "log_prior", logp)
        for arr in (self.kernel, self.prior, self.support, self.log_kernel, self.log_prior):
            arr.setflags(write=False)

    @property
    def num_hypotheses(self) -> int:
        return len(self.hypotheses)

    @property
    def num_experiments(self) -> int:
        return len(self.experiments)

    @property
    def num_observations(self) -> int:
        return len(self.observations)

    def support_indices(self, u: int) -> np.ndarray:
        return np.flatnonzero(self.support[u])

    def alternates(self, i: int) -> tuple[int, ...]:
        return tuple(j for j in range(self.num_hypotheses) if j != i)


def make_model(hypotheses, experiments, observations, kernel, prior,
               llr_slack: float = 0.0) -> HypothesisModel:
    """Validate raw arrays and build a HypothesisModel.

    The LLR bound B is the maximum |log(p_i^u(y)/p_j^u(y))| over the
    support, plus `llr_slack` (default 0, i.e. the tight maximum).
    """
    kernel = np.array(kernel, dtype=float)
    prior = np.array(prior, dtype=float)
    hypotheses = tuple(str(h) for h in hypotheses)
    experiments = tuple(str(u) for u in experiments)
    observations = tuple(str(y) for y in observations)
    M, U, Y = len(hypotheses), len(experiments), len(observations)
    if M < 2:
        raise ModelError(f"need at least 2 hypotheses, got {M}")
    if U < 1 or Y < 1:
        raise ModelError("need at least one experiment and one observation")
    if kernel.shape != (M, U, Y):
        raise ModelError(f"kernel shape {kernel.shape} does not match (M,U,Y)=({M},{U},{Y})")
    if prior.shape != (M,):
        raise ModelError(f"prior shape {prior.shape} does not match M={M}")
    if np.any(kernel < 0):
        bad = np.argwhere(kernel < 0)[0]
        raise ModelError(f"negative probability at kernel[{bad[0]},{bad[1]},{bad[2]}]")

    sums = kernel.sum(axis=2)
    if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
        i, u = np.argwhere(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]
        raise ModelError(
            f"kernel row (hypothesis={hypotheses[i]}, experiment={experiments[u]}) "
            f"sums to {sums[i, u]!r}, not 1 within {ROW_SUM_TOL}")

    # Common support: strictly positive entries must agree across hypotheses.
    pos = kernel > 0
    support = pos[0]
    for i in range(1, M):
        if not np.array_equal(pos[i], support):
            u = int(np.argwhere((pos[i] != support).any(axis=1))[0][0])
            raise ModelError(
                f"common-support violation under experiment {experiments[u]}: "
                f"hypotheses {hypotheses[0]} and {hypotheses[i]} have different supports")
    if np.any(~support.any(axis=1)):
        u = int(np.argwhere(~support.any(axis=1))[0][0])
        raise ModelError(f"experiment {experiments[u]} has empty support")

    if np.any(prior <= 0):
        i = int(np.argwhere(prior <= 0)[0][0])
        raise ModelError(f"prior lacks full support: prior[{hypotheses[i]}] = {prior[i]!r}")
    if abs(prior.sum() - 1.0) > ROW_SUM_TOL:
        raise ModelError(f"prior sums to {prior.sum()!r}, not 1 within {ROW_SUM_TOL}")

    with np.errstate(divide="ignore"):
        logk = np.where(kernel > 0, np.log(np.where(kernel > 0, kernel, 1.0)), -np.inf)
    B = 0.0
    for u in range(U):
        idx = np.flatnonzero(support[u])
        lk = logk[:, u, idx]                       # (M, |support|)
        diffs = np.abs(lk[:, None, :] - lk[None, :, :])
        B = max(B, float(diffs.max()))
    B += float(llr_slack)
    if not np.isfinite(B):
        raise ModelError("LLR bound is not finite")
    if B == 0.0:
        # Totally uninformative model: every positive constant strictly
        # dominates the (all-zero) LLRs; keep the bound usable.
        B = 1.0

    model = HypothesisModel(hypotheses, experiments, observations,
                            kernel, prior, support, B)
    if not assumption_pairwise_informative(model):
        warnings.warn(
            "some experiment fails to distinguish some pair of hypotheses "
            "(zero pairwise KL divergence); fine for asymmetric use",
            RuntimeWarning, stacklevel=2)
    return model


def assumption_pairwise_informative(model: HypothesisModel) -> bool:
    """True when every experiment distinguishes every pair of hypotheses,
    i.e. D(p_i^u || p_j^u) > 0 for all u and all i != j."""
    for u in range(model.num_experiments):
        idx = model.support_indices(u)
        for i in range(model.num_hypotheses):
            for j in range(model.num_hypotheses):
                if i != j and np.array_equal(model.kernel[i, u, idx], model.kernel[j, u, idx]):
                    return False
    return True


def kl_divergence(p, q) -> float:
    """KL divergence sum_y p(y) log(p(y)/q(y)) in nats.

    Both arguments must be strictly positive on the same coordinates
    (the common support); anything else is a usage error here.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ModelError("distributions have mismatched supports")
    pos_p, pos_q = p > 0, q > 0
    if not np.array_equal(pos_p, pos_q):
        raise ModelError("distributions have mismatched supports")
    p, q = p[pos_p], q[pos_q]
    return float(np.sum(p * (np.log(p) - np.log(q))))


def kl_matrix(model: HypothesisModel, i: int) -> np.ndarray:
    """Matrix A[u, k] = D(p_i^u || p_j^u) over alternates j != i (column
    order: ascending j)."""
    alts = model.alternates(i)
    A = np.zeros((model.num_experiments, len(alts)))
    for u in range(model.num_experiments):
        idx = model.support_indices(u)
        for k, j in enumerate(alts):
            A[u, k] = kl_divergence(model.kernel[i, u, idx], model.kernel[j, u, idx])
    return A


def log_likelihood_ratio(model: HypothesisModel, i: int, j: int, u: int, y: int) -> float:
    """log(p_i^u(y) / p_j^u(y)); y must be in the support of experiment u."""
    if not model.support[u, y]:
        raise ModelError(
            f"observation {model.observations[y]} outside the support of "
            f"experiment {model.experiments[u]}")
    return float(model.log_kernel[i, u, y] - model.log_kernel[j, u, y])


def llr_table(model: HypothesisModel, i: int) -> np.ndarray:
    """Lookup L[k, u, y] = log(p_i^u(y)/p_j^u(y)) for alternates j != i
    (k indexes ascending j); 0 outside the support (callers must not
    step outside the support, which has probability zero anyway)."""
    alts = model.alternates(i)
    L = np.zeros((len(alts), model.num_experiments, model.num_observations))
    with np.errstate(invalid="ignore"):
        for k, j in enumerate(alts):
            diff = model.log_kernel[i] - model.log_kernel[j]
            L[k] = np.where(model.support, diff, 0.0)
    return L


# ---------------------------------------------------------------------------
# Model documents (YAML key-value tree)
# ---------------------------------------------------------------------------

def load_model(document: str, llr_slack: float = 0.0) -> HypothesisModel:
    """Parse and validate a model document.

    Layout: `hypotheses`, `experiments`, `observations` are lists of
    names; `prior` is a list of reals; `kernel` maps experiment ->
    hypothesis -> list of probabilities over the observations.
    """
    try:
        doc = yaml.safe_load(io.StringIO(document))
    except yaml.YAMLError as e:
        raise ModelError(f"cannot parse model document: {e}") from e
    if not isinstance(doc, dict):
        raise ModelError("model document must be a key-value tree")
    for key in ("hypotheses", "experiments", "observations", "prior", "kernel"):
        if key not in doc:
            raise ModelError(f"model document missing field {key!r}")
    hyps = [str(h) for h in doc["hypotheses"]]
    exps = [str(u) for u in doc["experiments"]]
    obs = [str(y) for y in doc["observations"]]
    prior = doc["prior"]
    M, U, Y = len(hyps), len(exps), len(obs)
    kernel = np.zeros((M, U, Y))
    ktree = {str(k): {str(h): v for h, v in row.items()}
             for k, row in doc["kernel"].items()}
    for u, uname in enumerate(exps):
        if uname not in ktree:
            raise ModelError(f"kernel missing experiment {uname!r}")
        row = ktree[uname]
        for i, hname in enumerate(hyps):
            if hname not in row:
                raise ModelError(f"kernel[{uname!r}] missing hypothesis {hname!r}")
            vals = row[hname]
            if len(vals) != Y:
                raise ModelError(
                    f"kernel[{uname!r}][{hname!r}] has {len(vals)} entries, expected {Y}")
            kernel[i, u, :] = [float(v) for v in vals]
    return make_model(hyps, exps, obs, kernel, prior, llr_slack=llr_slack)


def load_model_file(path, llr_slack: float = 0.0) -> HypothesisModel:
    with open(path, "r", encoding="utf-8") as fh:
        return load_model(fh.read(), llr_slack=llr_slack)


def serialize_model(model: HypothesisModel) -> str:
    """Emit a model document that round-trips bit-exactly.

    Probabilities are written with repr (shortest digits that reload to
    the same float64), so load_model(serialize_model(m)) reproduces the
    kernel and prior exactly.
    """
    out = io.StringIO()
    def fmt_list(vals):
        return "[" + ", ".join(repr(float(v)) for v in vals) + "]"
    def fmt_names(names):
        return "[" + ", ".join(repr(n) for n in names) + "]"
    out.write("hypotheses: " + fmt_names(model.hypotheses) + "\n")
    out.write("experiments: " + fmt_names(model.experiments) + "\n")
    out.write("observations: " + fmt_names(model.observations) + "\n")
    out.write("prior: " + fmt_list(model.prior) + "\n")
    out.write("kernel:\n")
    for u, uname in enumerate(model.experiments):
        out.write(f"  {uname!r}:\n")
        for i, hname in enumerate(model.hypotheses):
            out.write(f"    {hname!r}: " + fmt_list(model.kernel[i, u]) + "\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# Built-in models for the anomaly-detection experiments
# ---------------------------------------------------------------------------

def table1(nu: float = 0.6) -> HypothesisModel:
    """Two noisy sensors A and B watching for an anomaly.

    Hypothesis 0 is "no anomaly"; 1 and 2 locate the anomaly near sensor
    A or B.  P(Y=1 | X, U) is nu when the probed sensor sits next to the
    anomaly and 1-nu otherwise.  Uniform prior.
    """
    if not 0.0 < nu < 1.0:
        raise ModelError(f"nu must be in (0,1), got {nu}")
    p1 = {"A": [1 - nu, nu, 1 - nu], "B": [1 - nu, 1 - nu, nu]}
    kernel = np.zeros((3, 2, 2))
    for u, uname in enumerate(("A", "B")):
        for i in range(3):
            kernel[i, u, 1] = p1[uname][i]
            kernel[i, u, 0] = 1.0 - p1[uname][i]
    return make_model(["0", "1", "2"], ["A", "B"], ["0", "1"],
                      kernel, np.full(3, 1.0 / 3.0))


def table2() -> HypothesisModel:
    """The two-sensor setup extended with experiments C and D, on which
    a naive most-likely-alternate heuristic picks the wrong sensor."""
    p1 = {"A": [0.400, 0.600, 0.400],
          "B": [0.400, 0.400, 0.600],
          "C": [0.402, 0.598, 0.280],
          "D": [0.402, 0.280, 0.598]}
    kernel = np.zeros((3, 4, 2))
    for u, uname in enumerate(("A", "B", "C", "D")):
        for i in range(3):
            kernel[i, u, 1] = p1[uname][i]
            kernel[i, u, 0] = 1.0 - p1[uname][i]
    return make_model(["0", "1", "2"], ["A", "B", "C", "D"], ["0", "1"],
                      kernel, np.full(3, 1.0 / 3.0))


BUILTIN_MODELS = {"table1": table1, "table2": table2}


def resolve_model(name_or_path: str, llr_slack: float = 0.0) -> HypothesisModel:
    """Look up a built-in model by name or load a model file."""
    if name_or_path in BUILTIN_MODELS:
        return BUILTIN_MODELS[name_or_path]()
    return load_model_file(name_or_path, llr_slack=llr_slack)
