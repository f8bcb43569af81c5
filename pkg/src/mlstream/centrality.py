"""Layer centralities: covariance eigen-analysis of walker exposures and
the dominant eigenvector of the interlayer density matrix.

Both rankings come down to a dominant eigenpair of a small symmetric
matrix (k layers, k rarely above 20), solved by power iteration. The
strict entry point :func:`dominant_eigenpair` handles non-negative
matrices from the all-ones start vector. Covariance matrices need more
care — they carry negative entries and the all-ones vector can be exactly
orthogonal to the dominant eigenvector (two perfectly anti-correlated
layers do exactly that) — so the covariance path retries deterministic
start vectors and keeps the best converged eigenvalue.
"""
from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (FewerThanTwoLayers, InsufficientRows, NegativeEntry,
                     NonSymmetric, NotConverged, ZeroMatrix)
from .measures import DensityMatrix, layer_label
from .model import Layer, MultilayerStreamGraph
from .walks import ExposureMatrix, WalkPolicy, layer_exposure

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _batch_seed(seed: int, batch: int) -> int:
    """Derive a sub-seed for batch replicates (SplitMix64 finalizer)."""
    z = (seed + (batch + 1) * _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & (_MASK >> 1)  # walk seeds are 63-bit


@dataclass(frozen=True)
class CovarianceMatrix:
    """Population covariance of per-layer exposures across nodes."""

    layers: Tuple[Layer, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0.0))


@dataclass(frozen=True)
class CentralityReport:
    """Per-layer scores plus the solver evidence behind them.

    ``ranking`` lists layers by descending score; exact ties fall back to
    lexicographic layer labels (noted in ``tie_break``). For a reducible
    density matrix, ``blocks`` records the non-interacting layer groups —
    scores are only comparable within a block.
    """

    layers: Tuple[Layer, ...]
    scores: Tuple[float, ...]
    dominant_eigenvalue: float
    ranking: Tuple[Layer, ...]
    iterations: int
    residual: float
    degenerate: bool = False
    blocks: Optional[Tuple[Tuple[Layer, ...], ...]] = None
    score_sigma: Optional[Tuple[float, ...]] = None
    eigenvalue_sigma: Optional[float] = None
    tie_break: str = "lexicographic"

    def score(self, layer: Layer) -> float:
        return self.scores[self.layers.index(layer)]

    def rank(self, layer: Layer) -> int:
        """1-based position of the layer in the ranking."""
        return self.ranking.index(layer) + 1

    def write_csv(self, fp) -> None:
        writer = csv.writer(fp)
        writer.writerow(["layer", "score", "rank"])
        for layer in self.ranking:
            writer.writerow([layer_label(layer),
                             format(self.score(layer), ".12g"),
                             self.rank(layer)])

    def as_dict(self) -> dict:
        out = {
            "layers": [layer_label(l) for l in self.layers],
            "scores": list(self.scores),
            "dominant_eigenvalue": self.dominant_eigenvalue,
            "ranking": [layer_label(l) for l in self.ranking],
            "iterations": self.iterations,
            "residual": self.residual,
            "degenerate": self.degenerate,
            "tie_break": self.tie_break,
        }
        if self.blocks is not None:
            out["blocks"] = [[layer_label(l) for l in blk]
                             for blk in self.blocks]
        if self.score_sigma is not None:
            out["score_sigma"] = list(self.score_sigma)
        if self.eigenvalue_sigma is not None:
            out["eigenvalue_sigma"] = self.eigenvalue_sigma
        return out

    def write_json(self, fp) -> None:
        json.dump(self.as_dict(), fp, indent=2)
        fp.write("\n")


def _make_report(layers, scores, eigenvalue, iterations, residual,
                 **extra) -> CentralityReport:
    scores = tuple(float(s) for s in scores)
    order = sorted(range(len(layers)),
                   key=lambda i: (-scores[i], layer_label(layers[i])))
    ranking = tuple(layers[i] for i in order)
    return CentralityReport(layers=tuple(layers), scores=scores,
                            dominant_eigenvalue=float(eigenvalue),
                            ranking=ranking, iterations=iterations,
                            residual=float(residual), **extra)


# --- covariance --------------------------------------------------------------


def covariance_of_exposures(x: ExposureMatrix) -> CovarianceMatrix:
    """Population covariance of layer exposures, expectation over rows."""
    vals = np.asarray(x.values, dtype=float)
    if vals.shape[0] < 2:
        raise InsufficientRows(
            f"covariance needs at least 2 rows, got {vals.shape[0]}")
    centered = vals - vals.mean(axis=0)
    cov = centered.T @ centered / vals.shape[0]
    cov = (cov + cov.T) / 2.0  # scrub float asymmetry
    return CovarianceMatrix(layers=x.layers, values=cov)


# --- power iteration ---------------------------------------------------------


def _sign_normalize(v: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(v)))
    if v[j] < 0:
        return -v
    return v


def _power_core(m: np.ndarray, v0: np.ndarray, tol: float, max_iter: int):
    """Power iteration; returns (ok, eigenvalue, vector, iterations, residual).

    Accepts only when the Rayleigh quotient has settled *and* the residual
    ``|Mv - lam v|`` is below ``10 * tol``; a vanishing image ``Mv`` means
    the start vector sits in the null space and counts as failure (the
    caller may retry from elsewhere).
    """
    v = v0 / np.linalg.norm(v0)
    lam = float(v @ (m @ v))
    for it in range(1, max_iter + 1):
        w = m @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return False, 0.0, v, it, float(np.linalg.norm(m @ v))
        new_lam = float(v @ w)
        residual = float(np.linalg.norm(w - new_lam * v))
        if abs(new_lam - lam) < tol and residual < 10.0 * tol:
            return True, new_lam, _sign_normalize(v), it, residual
        lam = new_lam
        v = w / norm
    residual = float(np.linalg.norm(m @ v - lam * v))
    return False, lam, _sign_normalize(v), max_iter, residual


def _check_square_symmetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if m.size and float(np.max(np.abs(m - m.T))) > 1e-12:
        raise NonSymmetric("matrix is not symmetric within 1e-12")
    return m


def _validate_nonneg(m) -> np.ndarray:
    m = _check_square_symmetric(m)
    if m.shape[0] == 0:
        raise ValueError("matrix must be non-empty")
    if float(m.min(initial=0.0)) < 0.0:
        raise NegativeEntry("matrix has negative entries")
    return m


def _nonneg_power(m: np.ndarray, tol: float, max_iter: int):
    """(eigenvalue, vector, iterations, residual) for validated input."""
    k = m.shape[0]
    v0 = np.ones(k)
    if not m.any():
        return 0.0, v0 / np.sqrt(k), 0, 0.0
    ok, lam, vec, iters, residual = _power_core(m, v0, tol, max_iter)
    if not ok:
        raise NotConverged(
            f"power iteration did not converge in {max_iter} iterations "
            f"(residual {residual:.3e})",
            eigenvalue=lam, eigenvector=vec, iterations=iters)
    return lam, vec, iters, residual


def dominant_eigenpair(m, tol: float = DEFAULT_TOL,
                       max_iter: int = DEFAULT_MAX_ITER):
    """Dominant eigenpair of a symmetric non-negative matrix.

    Power iteration from the all-ones vector; the returned vector is
    unit-norm with its largest-magnitude component positive. Raises
    :class:`NotConverged` (carrying the last iterate) after ``max_iter``.
    """
    lam, vec, _, _ = _nonneg_power(_validate_nonneg(m), tol, max_iter)
    return lam, vec


def _solve_symmetric(m: np.ndarray, tol: float, max_iter: int):
    """Dominant eigenpair for a symmetric (possibly indefinite) matrix.

    Tries the all-ones start first, then every basis vector (ordered by
    descending diagonal). The dominant eigenvector cannot be orthogonal
    to all of them, so the largest converged eigenvalue is the answer.
    """
    k = m.shape[0]
    starts = [np.ones(k)]
    for j in sorted(range(k), key=lambda j: (-m[j, j], j)):
        e = np.zeros(k)
        e[j] = 1.0
        starts.append(e)
    best = None
    total_iters = 0
    for v0 in starts:
        ok, lam, vec, iters, residual = _power_core(m, v0, tol, max_iter)
        total_iters += iters
        if ok and (best is None or lam > best[0]):
            best = (lam, vec, residual)
    if best is None:
        raise NotConverged(
            f"power iteration failed from every start vector "
            f"({max_iter} iterations each)",
            iterations=total_iters)
    lam, vec, residual = best
    return lam, vec, total_iters, residual


# --- superimposed centrality -------------------------------------------------


def _covariance_scores(cov: CovarianceMatrix, tol: float, max_iter: int):
    """(scores, eigenvalue, iterations, residual, degenerate flag)."""
    k = len(cov.layers)
    if cov.is_zero:
        return np.full(k, 1.0 / np.sqrt(k)), 0.0, 0, 0.0, True
    lam, vec, iters, residual = _solve_symmetric(cov.values, tol, max_iter)
    return np.abs(vec), lam, iters, residual, False


def centrality_from_exposures(x: ExposureMatrix,
                              tol: float = DEFAULT_TOL,
                              max_iter: int = DEFAULT_MAX_ITER
                              ) -> CentralityReport:
    """Covariance eigen-ranking for an exposure matrix computed elsewhere.

    Useful when exposures are averaged over several runs, or come from the
    closed-form per-record weighting instead of simulated walks.
    """
    if len(x.layers) < 2:
        raise FewerThanTwoLayers(
            f"layer ranking needs >= 2 layers, got {len(x.layers)}")
    cov = covariance_of_exposures(x)
    scores, lam, iters, residual, degenerate = _covariance_scores(
        cov, tol, max_iter)
    return _make_report(x.layers, scores, lam, iters, residual,
                        degenerate=degenerate)


def superimposed_centrality(g: MultilayerStreamGraph, policy: WalkPolicy,
                            tol: float = DEFAULT_TOL,
                            max_iter: int = DEFAULT_MAX_ITER,
                            sigma_batches: int = 10) -> CentralityReport:
    """Rank layers by the dominant eigenvector of the exposure covariance.

    The dominant eigenvalue is the scalar centrality; per-layer scores are
    the absolute eigenvector components. ``score_sigma`` reports the
    spread of the scores across ``sigma_batches`` independent replicates
    (smaller walk budgets, derived sub-seeds), as a Monte-Carlo error bar.
    A covariance of all zeros yields equal scores with ``degenerate`` set.
    """
    layers = g.layers
    if len(layers) < 2:
        raise FewerThanTwoLayers(
            f"superimposed centrality needs >= 2 layers, got {len(layers)}")
    x = layer_exposure(g, policy)
    cov = covariance_of_exposures(x)
    scores, lam, iters, residual, degenerate = _covariance_scores(
        cov, tol, max_iter)

    sigma = eig_sigma = None
    if sigma_batches and sigma_batches > 1:
        per_batch = max(1, policy.num_walks // sigma_batches)
        batch_scores = []
        batch_lams = []
        for b in range(sigma_batches):
            sub = dataclasses.replace(policy, num_walks=per_batch,
                                      seed=_batch_seed(policy.seed, b))
            bs, bl, _, _, _ = _covariance_scores(
                covariance_of_exposures(layer_exposure(g, sub)),
                tol, max_iter)
            batch_scores.append(bs)
            batch_lams.append(bl)
        arr = np.asarray(batch_scores)
        sigma = tuple(float(s) for s in arr.std(axis=0))
        eig_sigma = float(np.std(batch_lams))

    return _make_report(layers, scores, lam, iters, residual,
                        degenerate=degenerate, score_sigma=sigma,
                        eigenvalue_sigma=eig_sigma)


# --- juxtaposed centrality ---------------------------------------------------


def _connectivity_blocks(m: np.ndarray) -> List[List[int]]:
    """Connected components of the off-diagonal nonzero pattern."""
    k = m.shape[0]
    seen = [False] * k
    blocks = []
    for start in range(k):
        if seen[start]:
            continue
        comp = []
        stack = [start]
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(k):
                if j != i and not seen[j] and m[i, j] != 0.0:
                    seen[j] = True
                    stack.append(j)
        blocks.append(sorted(comp))
    return blocks


def juxtaposed_centrality(delta: DensityMatrix, tol: float = DEFAULT_TOL,
                          max_iter: int = DEFAULT_MAX_ITER
                          ) -> CentralityReport:
    """Rank layers by the dominant eigenvector of the density matrix.

    An irreducible matrix gets its Perron vector (strictly positive, unit
    norm). A reducible one is split into non-interacting blocks; each
    block is solved on its own and the block vectors are scaled by
    ``1/sqrt(#blocks)`` so the whole score vector stays unit-norm —
    ``blocks`` is set to signal that cross-block scores are not
    comparable. The eigenvalue reported is the largest across blocks.
    """
    m = _check_square_symmetric(np.asarray(delta.values, dtype=float))
    layers = tuple(delta.layers)
    if m.shape[0] != len(layers):
        raise ValueError("layer list does not match matrix shape")
    if float(m.min(initial=0.0)) < 0.0:
        raise NegativeEntry("density matrix has negative entries")
    if not m.any():
        raise ZeroMatrix("density matrix is all zeros")

    blocks = _connectivity_blocks(m)
    if len(blocks) == 1:
        lam, vec, iters, residual = _nonneg_power(m, tol, max_iter)
        return _make_report(layers, np.abs(vec), lam, iters, residual)

    scores = np.zeros(len(layers))
    scale = 1.0 / np.sqrt(len(blocks))
    best_lam = -np.inf
    worst_residual = 0.0
    total_iters = 0
    for comp in blocks:
        sub = m[np.ix_(comp, comp)]
        lam, vec, iters, residual = _nonneg_power(sub, tol, max_iter)
        worst_residual = max(worst_residual, residual)
        best_lam = max(best_lam, lam)
        total_iters += iters
        scores[comp] = np.abs(vec) * scale
    block_layers = tuple(tuple(layers[i] for i in comp) for comp in blocks)
    return _make_report(layers, scores, best_lam, total_iters,
                        worst_residual, blocks=block_layers)
