"""Dense complex matrix kernel: eigenvalues, clustering, rank, determinant,
classical characteristic polynomials, and contour-integral spectral projectors.

Matrices are plain ``numpy`` arrays of complex128; ``as_matrix`` is the single
validation gate (square, finite entries). Eigenvalues come from LAPACK's
Hessenberg + shifted-QR driver via ``numpy.linalg.eigvals``, which is
backward stable for general dense complex spectra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jsonio import complex_to_pair, matrix_to_rows, pair_to_complex, rows_to_matrix


class ConvergenceError(Exception):
    """Raised when an eigenvalue iteration fails to converge."""


class ContourError(Exception):
    """Raised when a spectral contour is invalid or too close to the spectrum.

    Carries the measured idempotency defect when the trapezoid result fails
    the projection check.
    """

    def __init__(self, msg, defect=None):
        super().__init__(msg)
        self.defect = defect


def as_matrix(m) -> np.ndarray:
    """Validate and normalize a square complex matrix with finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        raise ValueError("empty matrices are not supported")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix entries must be finite")
    return a


def frobenius(m) -> float:
    return float(np.linalg.norm(np.asarray(m), "fro"))


def eig(m) -> np.ndarray:
    """All eigenvalues of ``m``, repeated per algebraic multiplicity."""
    a = as_matrix(m)
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration failed: {exc}") from exc


@dataclass(frozen=True)
class ClusteredSpectrum:
    """Distinct spectral values with algebraic counts.

    ``points`` holds ``(value, count)`` pairs; representatives of distinct
    clusters are more than ``tol`` apart, and the counts sum to the number of
    input eigenvalues. A count of 0 marks a value adjoined by an ambient rule
    rather than observed among matrix eigenvalues.
    """

    points: tuple[tuple[complex, int], ...]
    tol: float

    def values(self) -> list[complex]:
        return [v for v, _ in self.points]

    def counts(self) -> list[int]:
        return [c for _, c in self.points]

    def total(self) -> int:
        return sum(c for _, c in self.points)

    def count_at(self, z: complex) -> int:
        """Count of the cluster within ``tol`` of ``z`` (0 if none)."""
        for v, c in self.points:
            if abs(v - z) <= self.tol:
                return c
        return 0

    def nearest(self, z: complex) -> tuple[complex, float]:
        best, dist = None, np.inf
        for v, _ in self.points:
            d = abs(v - z)
            if d < dist:
                best, dist = v, d
        return best, float(dist)

    def to_json(self) -> list[dict]:
        return [{"value": complex_to_pair(v), "count": int(c)} for v, c in self.points]

    @staticmethod
    def from_json(items, tol: float) -> "ClusteredSpectrum":
        pts = tuple((pair_to_complex(d["value"]), int(d["count"])) for d in items)
        return ClusteredSpectrum(points=pts, tol=float(tol))


def cluster(values, tol: float) -> ClusteredSpectrum:
    """Single-linkage clustering of complex values at tolerance ``tol``.

    Each cluster is represented by its count-weighted mean. Representatives
    are re-merged until they are pairwise more than ``tol`` apart, so the
    distinctness invariant holds even for chained clusters.
    """
    if tol <= 0:
        raise ValueError("cluster tolerance must be positive")
    vals = [complex(v) for v in np.asarray(values, dtype=np.complex128).ravel()]
    if not vals:
        return ClusteredSpectrum(points=(), tol=tol)

    # union-find single linkage on all pairs within tol
    parent = list(range(len(vals)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if abs(vals[i] - vals[j]) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri

    groups: dict[int, list[complex]] = {}
    for i, v in enumerate(vals):
        groups.setdefault(find(i), []).append(v)
    points = [(sum(g) / len(g), len(g)) for g in groups.values()]

    # enforce representative separation: merge cluster means within tol
    merged = True
    while merged and len(points) > 1:
        merged = False
        for i in range(len(points)):
            for j in range(i + 1, len(points)):
                if abs(points[i][0] - points[j][0]) <= tol:
                    (vi, ci), (vj, cj) = points[i], points[j]
                    points[i] = ((vi * ci + vj * cj) / (ci + cj), ci + cj)
                    del points[j]
                    merged = True
                    break
            if merged:
                break

    points.sort(key=lambda p: (p[0].real, p[0].imag))
    return ClusteredSpectrum(points=tuple(points), tol=tol)


def mat_rank(m, tol: float) -> int:
    """Classical rank: singular values above ``tol * max(s_max, 1)``."""
    if tol <= 0:
        raise ValueError("rank tolerance must be positive")
    s = np.linalg.svd(as_matrix(m), compute_uv=False)
    cutoff = tol * max(float(s[0]) if s.size else 0.0, 1.0)
    return int(np.sum(s > cutoff))


def mat_det(m) -> complex:
    """Classical determinant via LU factorization."""
    return complex(np.linalg.det(as_matrix(m)))


def classical_charpoly(m) -> np.ndarray:
    """Coefficients of ``prod_i (lambda_i - lambda)`` in descending powers.

    Degree equals the matrix dimension and the leading coefficient is
    ``(-1)^dim``. Built from the computed eigenvalues rather than by
    expanding ``det(m - lambda I)`` symbolically.
    """
    values = eig(m)
    n = len(values)
    return ((-1.0) ** n) * np.poly(values)


def riesz_projection(m, center: complex, radius: float, nodes: int = 64,
                     idem_tol: float = 1e-8, trace_tol: float = 1e-6,
                     clearance: float = 0.1) -> np.ndarray:
    """Spectral projector ``(2 pi i)^-1 \\oint (zeta I - m)^-1 d zeta``.

    The contour is the circle ``|zeta - center| = radius`` discretized by the
    trapezoidal rule, which converges exponentially for the analytic
    resolvent. The result must pass an idempotency check and have trace
    within ``trace_tol`` of an integer (the enclosed algebraic multiplicity);
    otherwise the contour is rejected as too close to the spectrum.
    """
    a = as_matrix(m)
    if radius <= 0:
        raise ValueError("contour radius must be positive")
    if nodes < 16:
        raise ValueError("need at least 16 quadrature nodes")

    values = eig(a)
    if values.size:
        dist_to_circle = np.abs(np.abs(values - center) - radius)
        if float(np.min(dist_to_circle)) < clearance * radius:
            raise ContourError(
                "contour too close to spectrum: eigenvalue within "
                f"{clearance:g}*radius of the circle")

    n = a.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    acc = np.zeros_like(a)
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    for t in theta:
        w = radius * np.exp(1j * t)
        acc += w * np.linalg.solve((center + w) * eye - a, eye)
    p = acc / nodes

    defect = frobenius(p @ p - p)
    if defect > idem_tol * (1.0 + frobenius(p)):
        raise ContourError(
            f"contour too close to spectrum: ||p^2 - p|| = {defect:.3e}",
            defect=defect)
    tr = complex(np.trace(p))
    if abs(tr - round(tr.real)) > trace_tol:
        raise ContourError(
            f"projector trace {tr} is not near an integer", defect=defect)
    return p


def hausdorff(points_a, points_b) -> float:
    """Hausdorff distance between two finite sets of complex points.

    Two empty sets are at distance 0; an empty set against a nonempty one is
    at infinite distance.
    """
    pa = [complex(z) for z in points_a]
    pb = [complex(z) for z in points_b]
    if not pa and not pb:
        return 0.0
    if not pa or not pb:
        return float("inf")
    d_ab = max(min(abs(x - y) for y in pb) for x in pa)
    d_ba = max(min(abs(x - y) for y in pa) for x in pb)
    return max(d_ab, d_ba)


def matrix_to_json(m) -> list:
    """JSON form of a matrix: array of rows, entries as [re, im] pairs."""
    return matrix_to_rows(as_matrix(m))


def matrix_from_json(rows) -> np.ndarray:
    return as_matrix(rows_to_matrix(rows))
