"""Restricted eigenvalues, restricted orthogonality and coherence by exact enumeration.

Every quantity is computed on the unit-diagonal Gram ``X^T X / n`` (see
:func:`dantzig_lab.problem.gram`).  Two reductions keep the enumeration
small without changing the answer:

* By Cauchy interlacing, the smallest (largest) eigenvalue over subsets of
  size at most ``m`` is attained at size exactly ``min(m, p)``.
* The spectral norm of a cross-Gram block can only grow when either index
  set grows, so ``theta`` only needs the largest admissible disjoint pairs.

Subsets are visited in lexicographic order and the first achiever of the
extremum is reported.  Exceeding the subset budget raises
:class:`BudgetExceededError`; nothing is ever sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import BudgetExceededError, InvalidArgsError
from .problem import gram

DEFAULT_BUDGET = 2_000_000
CHUNK = 20_000
TIE_TOL = 1e-12

DEFAULT_M = 1.0 / 32.0
DEFAULT_EPSILON = 1e-3
DEFAULT_K_UNDERLINE = 1e-6


@dataclass(frozen=True)
class Extremum:
    value: float
    subset: tuple
    count: int


def _full_gram(problem_or_gram):
    if isinstance(problem_or_gram, np.ndarray):
        return problem_or_gram
    return gram(problem_or_gram)


def _check_budget(count, budget):
    if count > budget:
        raise BudgetExceededError(count, budget)


def _subset_chunks(p, m):
    it = combinations(range(p), m)
    while True:
        block = np.fromiter((i for c in _take(it, CHUNK) for i in c), dtype=np.intp)
        if block.size == 0:
            return
        yield block.reshape(-1, m)


def _take(it, k):
    for _ in range(k):
        try:
            yield next(it)
        except StopIteration:
            return


def _restricted_eig(g, m, budget, largest):
    p = g.shape[0]
    if not 1 <= m:
        raise InvalidArgsError("m must be >= 1")
    k = min(m, p)
    count = math.comb(p, k)
    _check_budget(count, budget)
    best = None
    best_subset = None
    for idx in _subset_chunks(p, k):
        blocks = g[idx[:, :, None], idx[:, None, :]]
        w = np.linalg.eigvalsh(blocks)
        vals = w[:, -1] if largest else w[:, 0]
        pos = int(np.argmax(vals) if largest else np.argmin(vals))
        v = float(vals[pos])
        if best is None or (v > best if largest else v < best):
            best, best_subset = v, tuple(int(i) for i in idx[pos])
    return Extremum(best, best_subset, count)


def phi_min(problem, m, budget=DEFAULT_BUDGET, detail=False):
    """Smallest eigenvalue of ``X_L^T X_L / n`` over all ``|L| <= m``.

    Requesting ``m > p`` is answered at ``m = p``.  With ``detail=True`` an
    :class:`Extremum` carrying the achieving subset is returned.
    """
    ext = _restricted_eig(_full_gram(problem), m, budget, largest=False)
    return ext if detail else ext.value


def phi_max(problem, m=None, budget=DEFAULT_BUDGET, detail=False):
    """Largest eigenvalue over ``|L| <= m``; the full Gram when ``m`` is None."""
    g = _full_gram(problem)
    if m is None:
        ext = Extremum(float(np.linalg.eigvalsh(g)[-1]), tuple(range(g.shape[0])), 1)
    else:
        ext = _restricted_eig(g, m, budget, largest=True)
    return ext if detail else ext.value


def _pairs_count(p, a, b):
    return math.comb(p, a) * math.comb(p - a, b)


def _theta_sizes(p, m, m_prime, capped):
    if m < 1 or m_prime < 1:
        raise InvalidArgsError("theta needs m, m' >= 1")
    if m + m_prime <= p:
        return [(m_prime, m)]
    if not capped:
        raise InvalidArgsError(f"m + m' = {m + m_prime} exceeds p = {p}")
    if p < 2:
        raise InvalidArgsError("theta needs at least two columns")
    # largest admissible pairs (|L|, |L'|) with |L| + |L'| = p
    return [(a, p - a) for a in range(1, min(m_prime, p - 1) + 1) if 1 <= p - a <= m]


def _theta_pairs(p, a, b):
    all_idx = range(p)
    for left in combinations(all_idx, a):
        rest = [i for i in all_idx if i not in left]
        for right in combinations(rest, b):
            yield left, right


def theta(problem, m, m_prime, budget=DEFAULT_BUDGET, detail=False, capped=False):
    """Restricted orthogonality ``theta_{m, m'}``.

    The maximum over disjoint ``L, L'`` with ``|L| <= m'`` and ``|L'| <= m``
    of ``|<X_L c, X_L' c'>| / n`` over unit vectors ``c, c'``, i.e. of the
    spectral norm of the cross block ``X_L^T X_L' / n``.  With
    ``capped=True`` a request with ``m + m' > p`` is answered over the
    largest pairs that fit instead of raising :class:`InvalidArgsError`.
    """
    g = _full_gram(problem)
    p = g.shape[0]
    sizes = _theta_sizes(p, m, m_prime, capped)
    count = sum(_pairs_count(p, a, b) for a, b in sizes)
    _check_budget(count, budget)
    best, best_pair = -1.0, None
    for a, b in sizes:
        pairs = _theta_pairs(p, a, b)
        while True:
            chunk = list(_take(pairs, CHUNK))
            if not chunk:
                break
            li = np.array([c[0] for c in chunk], dtype=np.intp)
            ri = np.array([c[1] for c in chunk], dtype=np.intp)
            blocks = g[li[:, :, None], ri[:, None, :]]
            s = np.linalg.svd(blocks, compute_uv=False)[:, 0]
            pos = int(np.argmax(s))
            if s[pos] > best:
                best, best_pair = float(s[pos]), (tuple(int(i) for i in li[pos]), tuple(int(i) for i in ri[pos]))
    ext = Extremum(best, best_pair, count)
    return ext if detail else ext.value


def rho(problem, s):
    """Coherence ``rho_s``: the largest ``|(X_i, X_j)| / n`` with ``i`` in some ``|L| <= s`` and ``j`` outside.

    Every ordered pair ``i != j`` arises from ``L = {i}``, so for ``s >= 1``
    this is just the largest off-diagonal entry of the unit-diagonal Gram and
    does not depend on ``s``.
    """
    g = _full_gram(problem)
    p = g.shape[0]
    if not 1 <= s < p:
        raise InvalidArgsError(f"rho needs 1 <= s < p, got s={s}, p={p}")
    off = np.abs(g - np.diag(np.diag(g)))
    return float(off.max())


# --------------------------------------------------------------- verdicts


def _lt(a, b):
    """Strict ``a < b`` where values within ``TIE_TOL`` count as equal."""
    return a < b - TIE_TOL


@dataclass
class ConditionReport:
    s: int
    n: int
    p: int
    params: dict
    phi_min: dict = field(default_factory=dict)
    phi_max: dict = field(default_factory=dict)
    theta: dict = field(default_factory=dict)
    rho_s: float | None = None
    verdicts: dict = field(default_factory=dict)
    subsets: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    budget_exceeded: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def enumeration_exact(self) -> bool:
        return not self.budget_exceeded

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "n": self.n,
            "p": self.p,
            "params": self.params,
            "phi_min": {str(k): v for k, v in sorted(self.phi_min.items())},
            "phi_max": {str(k): v for k, v in sorted(self.phi_max.items(), key=lambda kv: str(kv[0]))},
            "theta": {f"{a},{b}": v for (a, b), v in sorted(self.theta.items())},
            "rho_s": self.rho_s,
            "verdicts": self.verdicts,
            "subsets": self.subsets,
            "counts": self.counts,
            "budget_exceeded": list(self.budget_exceeded),
            "enumeration_exact": self.enumeration_exact,
            "notes": list(self.notes),
        }


def evaluate_conditions(problem, s, k_bar=None, k_underline=DEFAULT_K_UNDERLINE, M=DEFAULT_M,
                        epsilon=DEFAULT_EPSILON, budget=DEFAULT_BUDGET) -> ConditionReport:
    """Compute the condition quantities for sparsity ``s`` and judge A1-A3.

    * A1:      ``phi_max <= k_bar`` (full Gram; ``k_bar`` defaults to ``p``)
    * A2:      ``phi_min(2s) >= k_underline``
    * A3(BTW): ``rho_s <= M / s``
    * A3(MY):  ``phi_min(ceil(s log n)) >= epsilon``
    * A3(CT):  ``theta_{s,2s} < phi_min(2s) < 1`` and ``phi_max(2s) + theta_{s,2s} < 2``

    Subset sizes are capped at ``p`` (and ``theta`` at disjoint pairs that
    fit).  A quantity whose enumeration exceeds ``budget`` is left absent,
    listed in ``budget_exceeded``, and any verdict depending on it is None.
    """
    g = gram(problem)
    n, p = problem.n, problem.p
    if s < 1:
        raise InvalidArgsError("s must be >= 1")
    k_bar = float(p) if k_bar is None else float(k_bar)
    m2 = min(2 * s, p)
    m_my = min(max(1, math.ceil(s * math.log(n))), p)
    report = ConditionReport(
        s, n, p,
        {"k_bar": k_bar, "k_underline": k_underline, "M": M, "epsilon": epsilon,
         "budget": int(budget), "m_2s": m2, "m_my": m_my},
    )

    def attempt(key, fn):
        try:
            ext = fn()
        except BudgetExceededError as exc:
            report.budget_exceeded.append(key)
            report.counts[key] = exc.count
            return None
        report.subsets[key] = [list(x) for x in ext.subset] if key.startswith("theta") else list(ext.subset)
        report.counts[key] = ext.count
        return ext.value

    pmax_full = attempt("phi_max_full", lambda: phi_max(g, None, detail=True))
    report.phi_max["full"] = pmax_full
    for m in sorted({m2, m_my}):
        report.phi_min[m] = attempt(f"phi_min_{m}", lambda m=m: phi_min(g, m, budget, detail=True))
    report.phi_max[m2] = attempt(f"phi_max_{m2}", lambda: phi_max(g, m2, budget, detail=True))
    th = None
    if p >= 2:
        th = attempt(f"theta_{s}_{2 * s}", lambda: theta(g, s, 2 * s, budget, detail=True, capped=True))
        report.theta[(s, 2 * s)] = th
        if 3 * s > p:
            report.notes.append(f"theta_{{s,2s}} evaluated over disjoint pairs of total size p={p}")
    report.rho_s = rho(g, s) if s < p else None
    if s >= p:
        report.notes.append("rho_s undefined for s >= p")

    pm2 = report.phi_min.get(m2)
    pmy = report.phi_min.get(m_my)
    pmax2 = report.phi_max.get(m2)

    v = {}
    v["A1"] = None if pmax_full is None else bool(pmax_full <= k_bar)
    v["A2"] = None if pm2 is None else bool(pm2 >= k_underline)
    v["A3_BTW"] = None if report.rho_s is None else bool(report.rho_s <= M / s)
    v["A3_MY"] = None if pmy is None else bool(pmy >= epsilon)
    if None not in (th, pm2, pmax2):
        v["A3_CT"] = bool(_lt(th, pm2) and _lt(pm2, 1.0) and _lt(pmax2 + th, 2.0))
        if abs(pm2 - 1.0) <= TIE_TOL:
            report.notes.append("phi_min(2s) equals 1, so the strict 'phi_min(2s) < 1' of A3(CT) fails")
    else:
        v["A3_CT"] = None
    report.verdicts = v
    return report
