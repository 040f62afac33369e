"""Row-stochastic matrices, ergodicity coefficients and mixing certificates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ROW_SUM_TOL = 1e-12


class ValidationError(ValueError):
    """Raised when a matrix or schedule violates its invariants."""


@dataclass(frozen=True)
class RowStochasticMatrix:
    """Nonnegative square matrix with unit row sums.

    Entries are re-normalized on construction if row sums are within
    ROW_SUM_TOL of 1; anything further off is rejected.
    """

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError(f"expected a square matrix, got shape {a.shape}")
        if np.any(a < 0):
            raise ValidationError("negative entry in row-stochastic matrix")
        sums = a.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
            worst = float(np.max(np.abs(sums - 1.0)))
            raise ValidationError(f"row sums deviate from 1 by {worst:.3e}")
        a = a / sums[:, None]
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, n: int) -> "RowStochasticMatrix":
        return cls(np.eye(n))

    @classmethod
    def uniform(cls, n: int) -> "RowStochasticMatrix":
        return cls(np.full((n, n), 1.0 / n))


@dataclass(frozen=True)
class SigmaSchedule:
    """Per-agent, per-instant segment fractions sigma_{i,k} in (0, 1]."""

    values: np.ndarray  # shape (instants, agents)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValidationError("sigma schedule must be 2-D (instants x agents)")
        if np.any(v <= 0) or np.any(v > 1):
            raise ValidationError("sigma values must lie in (0, 1]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def sigma_min(self) -> float:
        return float(self.values.min())


@dataclass(frozen=True)
class MixingCertificate:
    """Result of scanning L-step window products for uniform contraction."""

    window_length: int
    contraction_margin: float  # mu; <= 0 means not certified at this L
    windows_checked: int = field(default=0)

    @property
    def certified(self) -> bool:
        return self.contraction_margin > 0.0


def tau1(A: RowStochasticMatrix) -> float:
    """Coefficient of ergodicity: half the max L1 distance between rows."""
    a = A.entries
    diff = np.abs(a[:, None, :] - a[None, :, :]).sum(axis=2)
    return 0.5 * float(diff.max())


def tau1_overlap(A: RowStochasticMatrix) -> float:
    """Equivalent form: one minus the minimum pairwise row overlap."""
    a = A.entries
    overlap = np.minimum(a[:, None, :], a[None, :, :]).sum(axis=2)
    n = a.shape[0]
    if n == 1:
        return 0.0
    mask = ~np.eye(n, dtype=bool)
    return 1.0 - float(overlap[mask].min())


def window_product(seq, k: int, L: int) -> RowStochasticMatrix:
    """Ordered product H_{k+L-1} ... H_k; the empty window is the identity."""
    if L < 0 or k < 0 or k + L > len(seq):
        raise ValidationError(f"window [{k}, {k + L}) out of range for {len(seq)} matrices")
    if L == 0:
        n = seq[0].n if seq else 1
        return RowStochasticMatrix.identity(n)
    prod = seq[k].entries
    for j in range(k + 1, k + L):
        prod = seq[j].entries @ prod
    return RowStochasticMatrix(prod)


def sigma_modify(H: RowStochasticMatrix, sigmas) -> RowStochasticMatrix:
    """Pull each row of H toward the identity: I - Sigma + Sigma H."""
    s = np.asarray(sigmas, dtype=float)
    if s.shape != (H.n,):
        raise ValidationError(f"expected {H.n} sigma values, got shape {s.shape}")
    if np.any(s <= 0) or np.any(s > 1):
        raise ValidationError("sigma values must lie in (0, 1]")
    out = s[:, None] * H.entries
    out[np.diag_indices_from(out)] += 1.0 - s
    return RowStochasticMatrix(out)


def certify_mixing(seq, L: int) -> MixingCertificate:
    """Exhaustively scan all length-L windows and report the worst contraction.

    A non-positive margin is a structured negative result ("not certified at
    this L"), not an error.
    """
    if L < 1:
        raise ValidationError("window length must be a positive integer")
    if len(seq) < L:
        raise ValidationError(f"need at least {L} matrices, got {len(seq)}")
    worst = 0.0
    count = 0
    for k in range(len(seq) - L + 1):
        worst = max(worst, tau1(window_product(seq, k, L)))
        count += 1
    return MixingCertificate(window_length=L, contraction_margin=1.0 - worst,
                             windows_checked=count)


def random_row_stochastic(n: int, rng: np.random.Generator) -> RowStochasticMatrix:
    """Dense random row-stochastic matrix (testing helper)."""
    a = rng.uniform(0.0, 1.0, size=(n, n))
    return RowStochasticMatrix(a / a.sum(axis=1, keepdims=True))
