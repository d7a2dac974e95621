"""Correlation matrix, symmetric eigendecomposition, component selection.

The eigensolver is a cyclic Jacobi iteration: provably convergent for
symmetric matrices, deterministic (fixed sweep order, fixed sign
convention), and entirely adequate at the 31x31 scale this engine works
at. Reductions on the result path use fixed-order accumulation so that
identical inputs give bit-identical output everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateColumnError, InputError, NumericalError

# a p x p dense symmetric matrix and a p x k loading block are plain arrays
SymmetricMatrix = np.ndarray
LoadingMatrix = np.ndarray

DEFAULT_TOL = 1e-12
DEFAULT_MAX_SWEEPS = 100


class Basis(Enum):
    CORRELATION = "correlation"
    COVARIANCE = "covariance"


class LoadingConvention(Enum):
    UNIT_EIGENVECTOR = "unit"
    SQRT_EIGENVALUE = "sqrt_eigenvalue"


@dataclass
class Spectrum:
    """Eigenvalues in descending order; column j of eigenvectors pairs with eigenvalue j."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0
    off_diagonal_norm: float = 0.0

    @property
    def total_variance(self) -> float:
        return _ordered_sum(self.eigenvalues)


@dataclass
class ComponentSelection:
    """Prefix of components kept for weighting.

    threshold_count is how many the eigenvalue cutoff alone kept;
    extended flags that the prefix grew further to reach the variance
    target (the two retention criteria disagreed).
    """

    selected: list[int]
    explained_variance_ratio: float
    threshold_count: int
    extended: bool


def _ordered_sum(values) -> float:
    # fixed left-to-right accumulation keeps results platform-reproducible
    total = 0.0
    for v in values:
        total += float(v)
    return total


def correlation_matrix(data, basis: Basis = Basis.CORRELATION) -> SymmetricMatrix:
    """Pearson correlations (or sample covariances) of the columns of data.

    data is a NormalizedMatrix or a plain 2-D array; sample statistics use
    the n-1 denominator. A zero-variance column cannot be correlated and
    raises DegenerateColumnError.
    """
    if hasattr(data, "values"):
        values = np.asarray(data.values, dtype=np.float64)
        names = list(data.registry.ids)
    else:
        values = np.asarray(data, dtype=np.float64)
        names = [f"col{j}" for j in range(values.shape[1] if values.ndim == 2 else 0)]
    if values.ndim != 2:
        raise InputError("correlation input must be a 2-D matrix")
    n, p = values.shape
    if n < 3:
        raise InputError(f"need at least 3 rows to estimate correlations, got {n}")

    means = np.array([_ordered_sum(values[:, j]) / n for j in range(p)])
    dev = values - means

    cov = np.empty((p, p), dtype=np.float64)
    for j in range(p):
        for k in range(j, p):
            c = _ordered_sum(dev[:, j] * dev[:, k]) / (n - 1)
            cov[j, k] = c
            cov[k, j] = c

    if basis is Basis.COVARIANCE:
        return cov

    for j in range(p):
        if cov[j, j] == 0.0:
            raise DegenerateColumnError(names[j])
    corr = np.empty((p, p), dtype=np.float64)
    for j in range(p):
        corr[j, j] = 1.0
        for k in range(j + 1, p):
            r = cov[j, k] / math.sqrt(cov[j, j] * cov[k, k])
            r = min(1.0, max(-1.0, r))
            corr[j, k] = r
            corr[k, j] = r
    return corr


def _off_diagonal_norm(a: np.ndarray) -> float:
    p = a.shape[0]
    if p < 2:
        return 0.0
    upper = a[np.triu_indices(p, 1)]
    # numpy's pairwise reduction has a fixed order, so this stays reproducible
    return math.sqrt(2.0 * float(np.sum(upper * upper)))


def _fix_signs(vectors: np.ndarray) -> None:
    # flip each column so its largest-magnitude entry is positive,
    # lowest index breaking magnitude ties
    p = vectors.shape[1]
    for j in range(p):
        col = vectors[:, j]
        best = 0
        best_mag = abs(col[0])
        for i in range(1, len(col)):
            mag = abs(col[i])
            if mag > best_mag:
                best = i
                best_mag = mag
        if col[best] < 0.0:
            vectors[:, j] = -col


def eigendecompose(m: SymmetricMatrix, tol: float = DEFAULT_TOL,
                   max_sweeps: int = DEFAULT_MAX_SWEEPS) -> Spectrum:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps the upper triangle in row order, annihilating each off-diagonal
    entry, until the off-diagonal Frobenius norm drops below tol or the
    sweep cap is hit (NumericalError carrying the residual). Eigenpairs
    come back sorted by descending eigenvalue with a deterministic sign
    convention on the eigenvectors.
    """
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError("eigendecompose needs a square matrix")
    if not np.all(np.isfinite(a)):
        raise InputError("eigendecompose needs finite entries")
    if tol <= 0.0:
        raise InputError(f"tol must be positive, got {tol}")
    p = a.shape[0]
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(a - a.T))) > 1e-12 * scale:
        raise InputError("matrix is not symmetric within 1e-12")
    a = (a + a.T) / 2.0

    # Fused working block [A | V^T]: the matrix rows and the accumulated
    # eigenvector rows rotate with the same (c, s), so one pair of row
    # operations on the wide block updates both. Column entries of A are
    # then mirrored from the new rows, which is exact because A stays
    # bitwise symmetric throughout.
    work = np.empty((p, 2 * p), dtype=np.float64)
    work[:, :p] = a
    work[:, p:] = np.eye(p)
    amat = work[:, :p]
    buf_i = np.empty(2 * p, dtype=np.float64)
    buf_j = np.empty(2 * p, dtype=np.float64)
    buf_t = np.empty(2 * p, dtype=np.float64)
    # entries at or below this can never lift the off-diagonal norm back
    # above tol (p(p-1) of them contribute under tol^2/4 combined), so
    # rotating them is a no-op and they are skipped
    skip = tol / (2.0 * p)

    sweeps = 0
    off = _off_diagonal_norm(amat)
    while off >= tol and sweeps < max_sweeps:
        for i in range(p - 1):
            row_i = work[i]
            for j in range(i + 1, p):
                aij = float(amat[i, j])
                if abs(aij) <= skip:
                    continue
                aii = float(amat[i, i])
                ajj = float(amat[j, j])
                theta = (ajj - aii) / (2.0 * aij)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                elif theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                row_j = work[j]
                np.multiply(row_i, c, out=buf_i)
                np.multiply(row_j, s, out=buf_t)
                np.subtract(buf_i, buf_t, out=buf_i)
                np.multiply(row_i, s, out=buf_j)
                np.multiply(row_j, c, out=buf_t)
                np.add(buf_j, buf_t, out=buf_j)
                work[i] = buf_i
                work[j] = buf_j
                amat[:, i] = buf_i[:p]
                amat[:, j] = buf_j[:p]
                # exact identities for the rotated 2x2 block
                amat[i, i] = aii - t * aij
                amat[j, j] = ajj + t * aij
                amat[i, j] = 0.0
                amat[j, i] = 0.0
        sweeps += 1
        off = _off_diagonal_norm(amat)

    if off >= tol:
        raise NumericalError(
            f"Jacobi iteration did not converge in {max_sweeps} sweeps", residual=off)

    vectors = work[:, p:].T.copy()
    eigenvalues = np.diag(amat).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = vectors[:, order]
    _fix_signs(vectors)
    return Spectrum(eigenvalues=eigenvalues, eigenvectors=vectors,
                    sweeps=sweeps, off_diagonal_norm=off)


def select_components(spectrum: Spectrum, eigen_threshold: float = 1.0,
                      variance_target: float = 0.85) -> ComponentSelection:
    """Keep the descending-eigenvalue prefix above the threshold, extending to the variance target.

    The prefix never comes back empty: if no eigenvalue clears the
    threshold, the first component is kept on its own and that is the
    whole selection (a spectrum that flat gives the variance target no
    meaningful prefix to grow). Otherwise, if the threshold prefix
    explains less than variance_target, further components are pulled in
    (even below the threshold) until the target is met; the selection
    records that the extension fired.
    """
    eigenvalues = spectrum.eigenvalues
    p = len(eigenvalues)
    if p == 0:
        raise InputError("empty spectrum")
    total = _ordered_sum(eigenvalues)
    if total <= 0.0:
        raise NumericalError("total variance is not positive, cannot select components")

    threshold_count = 0
    for value in eigenvalues:
        if value > eigen_threshold:
            threshold_count += 1
        else:
            break
    k = max(threshold_count, 1)

    def ratio(count: int) -> float:
        return _ordered_sum(eigenvalues[:count]) / total

    extended = False
    if threshold_count > 0:
        while ratio(k) < variance_target and k < p:
            k += 1
            extended = True
    return ComponentSelection(
        selected=list(range(k)),
        explained_variance_ratio=ratio(k),
        threshold_count=threshold_count,
        extended=extended,
    )


def loading_matrix(spectrum: Spectrum, selection: ComponentSelection,
                   convention: LoadingConvention = LoadingConvention.UNIT_EIGENVECTOR) -> LoadingMatrix:
    """Loadings of each indicator on the selected components (columns, descending eigenvalue).

    The default convention takes unit-eigenvector entries as loadings; the
    alternative scales each column by the square root of its eigenvalue.
    """
    p = spectrum.eigenvectors.shape[0]
    for idx in selection.selected:
        if not (0 <= idx < p):
            raise InputError(f"selected component {idx} out of range for spectrum of size {p}")
    cols = spectrum.eigenvectors[:, selection.selected].copy()
    if convention is LoadingConvention.SQRT_EIGENVALUE:
        for pos, idx in enumerate(selection.selected):
            cols[:, pos] *= math.sqrt(max(spectrum.eigenvalues[idx], 0.0))
    return cols
