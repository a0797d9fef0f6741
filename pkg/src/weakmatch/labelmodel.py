"""Generative labeling model with class-conditional LF accuracies.

Each LF casts votes in {-1, 0, +1}; conditioned on the latent pair
class (match or non-match) its vote follows a three-outcome categorical
distribution, so an LF gets separate accuracies on matches and on
non-matches instead of a single pooled one. Parameters and posteriors
are estimated by EM; between the E- and M-step the posteriors can be
pushed into the feasible region of the transitivity constraint
p(i,j) * p(i,k) <= p(j,k) by a monotone multiplicative closure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .validation import check_clamps, check_vote_matrix

EPSILON = 1e-4
MATCH_THRESHOLD = 0.5


class AllAbstainError(ValueError):
    """Every LF abstained on every pair: no usable LFs."""


class NoPredictedMatchesError(ValueError):
    """The model currently predicts no matches at all."""


@dataclass
class LFParameters:
    """Class-conditional vote distributions, one triple per LF.

    pos_given_match[j] is P(vote=+1 | match) for LF j, and so on; the
    abstain probability is the derived remainder. match_accuracy and
    nonmatch_accuracy expose P(+1|match) and P(-1|non-match), the two
    quality numbers the stats panel reports.
    """

    pos_given_match: np.ndarray
    neg_given_match: np.ndarray
    pos_given_nonmatch: np.ndarray
    neg_given_nonmatch: np.ndarray

    @property
    def n_lfs(self) -> int:
        return self.pos_given_match.shape[0]

    @property
    def match_accuracy(self) -> np.ndarray:
        return self.pos_given_match

    @property
    def nonmatch_accuracy(self) -> np.ndarray:
        return self.neg_given_nonmatch

    def abstain_given_match(self) -> np.ndarray:
        return np.maximum(1.0 - self.pos_given_match - self.neg_given_match, 0.0)

    def abstain_given_nonmatch(self) -> np.ndarray:
        return np.maximum(1.0 - self.pos_given_nonmatch - self.neg_given_nonmatch, 0.0)

    def log_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """(J, 3) log-prob lookup per class, indexed by vote + 1.

        Derived abstain probabilities are floored at EPSILON inside the
        logs so an abstain vote never produces -inf.
        """
        def table(pos, neg):
            absn = np.maximum(1.0 - pos - neg, EPSILON)
            return np.log(np.stack([neg, absn, pos], axis=1))

        return (
            table(self.pos_given_match, self.neg_given_match),
            table(self.pos_given_nonmatch, self.neg_given_nonmatch),
        )

    def to_dict(self) -> dict:
        return {
            "pos_given_match": self.pos_given_match.tolist(),
            "neg_given_match": self.neg_given_match.tolist(),
            "pos_given_nonmatch": self.pos_given_nonmatch.tolist(),
            "neg_given_nonmatch": self.neg_given_nonmatch.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LFParameters":
        return cls(**{k: np.asarray(v, dtype=np.float64) for k, v in d.items()})


def _class_log_likelihoods(votes: np.ndarray, params: LFParameters,
                           prior: float) -> tuple[np.ndarray, np.ndarray]:
    log_m, log_u = params.log_tables()
    idx = votes.astype(np.int64) + 1  # -1/0/+1 -> 0/1/2
    cols = np.arange(votes.shape[1])
    ll_m = np.log(prior) + log_m[cols[None, :], idx].sum(axis=1)
    ll_u = np.log1p(-prior) + log_u[cols[None, :], idx].sum(axis=1)
    return ll_m, ll_u


def e_step(votes: np.ndarray, params: LFParameters, prior: float,
           clamps: np.ndarray | None = None) -> np.ndarray:
    """Posterior match probability per pair, computed in log space.

    Pairs with a ground-truth clamp come out exactly 0 or 1.
    """
    votes = check_vote_matrix(votes)
    if votes.shape[1] == 0:
        gamma = np.full(votes.shape[0], prior)
    else:
        ll_m, ll_u = _class_log_likelihoods(votes, params, prior)
        gamma = np.exp(ll_m - np.logaddexp(ll_m, ll_u))
    clamps = check_clamps(clamps, votes.shape[0])
    if clamps is not None:
        known = ~np.isnan(clamps)
        gamma = gamma.copy()
        gamma[known] = clamps[known]
    return gamma


def log_likelihood(votes: np.ndarray, params: LFParameters, prior: float,
                   clamps: np.ndarray | None = None) -> float:
    """Observed-data log-likelihood; clamped pairs use their known class."""
    ll_m, ll_u = _class_log_likelihoods(votes, params, prior)
    per_pair = np.logaddexp(ll_m, ll_u)
    if clamps is not None:
        clamps = check_clamps(clamps, votes.shape[0])
        known = ~np.isnan(clamps)
        per_pair = per_pair.copy()
        per_pair[known] = np.where(clamps[known] == 1.0, ll_m[known], ll_u[known])
    return float(per_pair.sum())


def m_step(votes: np.ndarray, gamma: np.ndarray,
           epsilon: float = EPSILON) -> tuple[LFParameters, float]:
    """Soft-count maximum-likelihood update of params and class prior.

    All probabilities are clamped to [epsilon, 1 - epsilon]; raw soft
    counts already satisfy pos + neg <= 1, and clamping preserves that
    bound, so the derived abstain mass never goes negative. A fully
    degenerate gamma (all 0 or all 1) clamps the prior instead of
    failing.
    """
    votes = check_vote_matrix(votes)
    gamma = np.asarray(gamma, dtype=np.float64)
    w_m = gamma
    w_u = 1.0 - gamma
    denom_m = max(w_m.sum(), np.finfo(float).tiny)
    denom_u = max(w_u.sum(), np.finfo(float).tiny)
    pos = votes == 1
    neg = votes == -1

    def clamp(x):
        return np.clip(x, epsilon, 1.0 - epsilon)

    params = LFParameters(
        pos_given_match=clamp(w_m @ pos / denom_m),
        neg_given_match=clamp(w_m @ neg / denom_m),
        pos_given_nonmatch=clamp(w_u @ pos / denom_u),
        neg_given_nonmatch=clamp(w_u @ neg / denom_u),
    )
    prior = float(np.clip(gamma.mean(), epsilon, 1.0 - epsilon))
    return params, prior


def majority_vote(votes: np.ndarray) -> np.ndarray:
    """Provisional posterior by the sign of the vote sum.

    Ties (including all-abstain rows) count as non-match: with heavy
    class imbalance, no positive evidence means no match, and seeding
    half the mass of every uncovered pair into the match class drags
    the initial prior toward 0.5 and EM into a degenerate optimum.
    """
    votes = check_vote_matrix(votes)
    return (votes.sum(axis=1) > 0).astype(np.float64)


def build_triangles(pairs: list[tuple]) -> np.ndarray:
    """Edge-index triples (e1, e2, e3) for every triangle in the pair graph.

    pairs are edges over opaque node keys; only triples whose three
    pairs are all present constrain anything. Left-right candidate
    graphs are bipartite and thus triangle-free; synthetic or
    within-table graphs are not.
    """
    edge_index: dict[tuple, int] = {}
    adj: dict[object, set] = {}
    for e, (a, b) in enumerate(pairs):
        edge_index[(a, b)] = e
        edge_index[(b, a)] = e
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    triangles = set()
    for a, b in pairs:
        smaller, other = (a, b) if len(adj[a]) <= len(adj[b]) else (b, a)
        for c in adj[smaller]:
            if c != other and c in adj[other]:
                tri = tuple(sorted((edge_index[(a, b)], edge_index[(a, c)],
                                    edge_index[(b, c)])))
                triangles.add(tri)
    return np.array(sorted(triangles), dtype=np.int64).reshape(-1, 3)


def transitivity_project(
    gamma: np.ndarray,
    pairs: list[tuple] | None = None,
    triangles: np.ndarray | None = None,
    fixed: np.ndarray | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Monotone closure onto the transitive feasible region.

    Repeatedly raises each triangle edge to the product of the other
    two until a full sweep changes nothing, which is the least upward
    correction satisfying every p(i,j) * p(i,k) <= p(j,k) constraint.
    Values only increase and stay <= 1, so the sweep terminates, and
    the fixed point does not depend on update order (rng only shuffles
    the sweep order, for testing exactly that). Entries marked fixed
    (ground-truth clamps) are never modified.
    """
    out = np.asarray(gamma, dtype=np.float64).copy()
    if triangles is None:
        if pairs is None:
            raise ValueError("need pairs or precomputed triangles")
        triangles = build_triangles(pairs)
    if triangles.size == 0:
        return out
    if fixed is None:
        fixed = np.zeros(out.shape[0], dtype=bool)
    order = np.arange(triangles.shape[0])
    changed = True
    while changed:
        changed = False
        if rng is not None:
            rng.shuffle(order)
        for t in order:
            e1, e2, e3 = triangles[t]
            g1, g2, g3 = out[e1], out[e2], out[e3]
            if not fixed[e1] and g2 * g3 > g1:
                out[e1] = g2 * g3
                changed = True
            g1 = out[e1]
            if not fixed[e2] and g1 * g3 > g2:
                out[e2] = g1 * g3
                changed = True
            g2 = out[e2]
            if not fixed[e3] and g1 * g2 > g3:
                out[e3] = g1 * g2
                changed = True
    return out


def lf_quality(votes: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Posterior-weighted FP and FN rate per LF.

    est_fpr[j]: of LF j's +1 votes, the posterior-weighted fraction the
    model deems non-match; 0 when it casts no +1 votes. est_fnr[j] is
    the mirror over -1 votes.
    """
    votes = check_vote_matrix(votes)
    gamma = np.asarray(gamma, dtype=np.float64)
    pos = votes == 1
    neg = votes == -1
    n_pos = pos.sum(axis=0)
    n_neg = neg.sum(axis=0)
    with np.errstate(invalid="ignore"):
        fpr = np.where(n_pos > 0, (1.0 - gamma) @ pos / np.maximum(n_pos, 1), 0.0)
        fnr = np.where(n_neg > 0, gamma @ neg / np.maximum(n_neg, 1), 0.0)
    return fpr, fnr


def fp_drilldown(votes_col: np.ndarray, gamma: np.ndarray,
                 threshold: float = MATCH_THRESHOLD) -> np.ndarray:
    """Row indices the LF calls match but the model does not.

    Sorted by posterior ascending: the model's most confident
    disagreements first.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    idx = np.where((np.asarray(votes_col) == 1) & (gamma < threshold))[0]
    return idx[np.argsort(gamma[idx], kind="stable")]


def fn_drilldown(votes_col: np.ndarray, gamma: np.ndarray,
                 threshold: float = MATCH_THRESHOLD) -> np.ndarray:
    """Row indices the LF calls non-match but the model calls match."""
    gamma = np.asarray(gamma, dtype=np.float64)
    idx = np.where((np.asarray(votes_col) == -1) & (gamma >= threshold))[0]
    return idx[np.argsort(-gamma[idx], kind="stable")]


def sample_predicted_matches(gamma: np.ndarray, n: int, seed: int,
                             threshold: float = MATCH_THRESHOLD) -> np.ndarray:
    """Seeded uniform sample (without replacement) of predicted matches."""
    gamma = np.asarray(gamma, dtype=np.float64)
    predicted = np.where(gamma >= threshold)[0]
    if predicted.size == 0:
        raise NoPredictedMatchesError("model currently predicts no matches")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(predicted, size=min(n, predicted.size), replace=False)
    return np.sort(chosen)


class TransitiveLabelModel(BaseEstimator):
    """EM-trained aggregator of LF votes with class-conditional accuracies.

    Parameters
    ----------
    max_iter : int
        EM iteration cap.
    tol : float
        Stop once the log-likelihood improves by less than this.
    seed : int
        Reserved for seeded downstream sampling; the fit itself is
        deterministic (majority-vote initialization).
    project_transitivity : bool
        Push posteriors into the transitive feasible region after each
        E-step (requires `pairs` at fit time to have any effect).
    epsilon : float
        Probability clamp keeping logs finite.
    match_threshold : float
        Posterior cutoff defining a predicted match.

    Attributes
    ----------
    match_prob_ : ndarray of shape (n_pairs,)
        Posterior match probability per fitted pair.
    match_prior_ : float
        Learned class prior P(match).
    params_ : LFParameters
        Per-LF class-conditional vote distributions.
    loglik_path_ : list of float
        Log-likelihood per iteration, computed before projection.
    n_iter_ : int
        Iterations actually run.
    """

    def __init__(self, max_iter: int = 100, tol: float = 1e-6, seed: int = 0,
                 project_transitivity: bool = True, epsilon: float = EPSILON,
                 match_threshold: float = MATCH_THRESHOLD):
        self.max_iter = max_iter
        self.tol = tol
        self.seed = seed
        self.project_transitivity = project_transitivity
        self.epsilon = epsilon
        self.match_threshold = match_threshold

    def fit(self, votes, pairs: list[tuple] | None = None, clamps=None):
        """Estimate parameters and posteriors from a vote matrix.

        votes : (n_pairs, n_lfs) array in {-1, 0, +1}.
        pairs : node-key tuples aligned with the rows; enables the
            transitivity closure over triangles of the pair graph.
        clamps : per-row NaN/0/1 vector of ground-truth pins.
        """
        votes = check_vote_matrix(votes)
        n = votes.shape[0]
        if n == 0 or votes.shape[1] == 0 or not (votes != 0).any():
            raise AllAbstainError("no usable LFs: every vote abstains")
        clamps = check_clamps(clamps, n)
        triangles = None
        fixed = None
        if self.project_transitivity and pairs is not None:
            if len(pairs) != n:
                raise ValueError("pairs must align with vote matrix rows")
            triangles = build_triangles(pairs)
            fixed = np.zeros(n, dtype=bool) if clamps is None else ~np.isnan(clamps)

        gamma = majority_vote(votes)
        if clamps is not None:
            known = ~np.isnan(clamps)
            gamma[known] = clamps[known]
        params, prior = m_step(votes, gamma, self.epsilon)

        loglik_path: list[float] = []
        for iteration in range(1, self.max_iter + 1):
            gamma = e_step(votes, params, prior, clamps)
            loglik_path.append(log_likelihood(votes, params, prior, clamps))
            if triangles is not None and triangles.size:
                gamma = transitivity_project(gamma, triangles=triangles, fixed=fixed)
            params, prior = m_step(votes, gamma, self.epsilon)
            if len(loglik_path) >= 2 and loglik_path[-1] - loglik_path[-2] < self.tol:
                break

        # refresh so the stored posterior reflects the final parameters
        gamma = e_step(votes, params, prior, clamps)
        if triangles is not None and triangles.size:
            gamma = transitivity_project(gamma, triangles=triangles, fixed=fixed)

        self.params_ = params
        self.match_prior_ = prior
        self.match_prob_ = gamma
        self.loglik_path_ = loglik_path
        self.n_iter_ = len(loglik_path)
        return self

    def predict_proba(self, votes) -> np.ndarray:
        """Posterior match probabilities for new vote rows."""
        if not hasattr(self, "params_"):
            raise RuntimeError("model is not fitted")
        return e_step(check_vote_matrix(votes), self.params_, self.match_prior_)

    def predict(self, votes) -> np.ndarray:
        """+1 (match) / -1 (non-match) by thresholding the posterior."""
        proba = self.predict_proba(votes)
        return np.where(proba >= self.match_threshold, 1, -1)
