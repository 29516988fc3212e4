"""Finite direct sums of full complex matrix blocks: elements, arithmetic,
spectra, corner compressions, and random generation.

An algebra is ``M_{n_1}(C) + ... + M_{n_k}(C)`` (blockwise operations). The
``ambient`` flag distinguishes the genuinely finite-dimensional case from a
model of a corner inside an infinite-dimensional algebra: in the infinite
ambient no element is invertible and 0 always belongs to the spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .config import DEFAULT_TOLS, Tolerances
from .jsonio import matrix_to_rows, rows_to_matrix
from .numkernel import (ClusteredSpectrum, as_matrix, cluster, eig, frobenius,
                        mat_rank, riesz_projection)

FINITE = "finite"
INFINITE_SOCLE = "infinite"
_AMBIENTS = (FINITE, INFINITE_SOCLE)


class ShapeMismatchError(ValueError):
    """Raised when two elements do not live in the same algebra."""


class NotInvertibleError(Exception):
    """Raised when inversion is requested for a non-invertible element."""


class ViewError(Exception):
    """Raised when a corner compression cannot be constructed."""


@dataclass(frozen=True)
class AlgebraShape:
    """Block dimensions plus the ambient mode."""

    dims: tuple[int, ...]
    ambient: str = FINITE

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) < 1 or any(d < 1 for d in dims):
            raise ValueError("block dimensions must be positive, one or more blocks")
        if self.ambient not in _AMBIENTS:
            raise ValueError(f"ambient must be one of {_AMBIENTS}")

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    @property
    def is_infinite(self) -> bool:
        return self.ambient == INFINITE_SOCLE


@dataclass(frozen=True, eq=False)
class Element:
    """An element ``(a_1, ..., a_k)``, one dense complex matrix per block."""

    shape: AlgebraShape
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(as_matrix(b).copy() for b in self.blocks)
        if len(blocks) != len(self.shape.dims):
            raise ShapeMismatchError(
                f"expected {len(self.shape.dims)} blocks, got {len(blocks)}")
        for b, d in zip(blocks, self.shape.dims):
            if b.shape[0] != d:
                raise ShapeMismatchError(
                    f"block of dim {b.shape[0]} does not match shape dim {d}")
            b.flags.writeable = False
        object.__setattr__(self, "blocks", blocks)

    def _check_same(self, other: "Element"):
        if self.shape != other.shape:
            raise ShapeMismatchError(f"{self.shape} vs {other.shape}")

    def __add__(self, other: "Element") -> "Element":
        self._check_same(other)
        return Element(self.shape, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "Element") -> "Element":
        self._check_same(other)
        return Element(self.shape, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self) -> "Element":
        return Element(self.shape, tuple(-a for a in self.blocks))

    def __mul__(self, other):
        if isinstance(other, Element):
            self._check_same(other)
            return Element(self.shape,
                           tuple(a @ b for a, b in zip(self.blocks, other.blocks)))
        return Element(self.shape, tuple(complex(other) * a for a in self.blocks))

    def __rmul__(self, scalar) -> "Element":
        return Element(self.shape, tuple(complex(scalar) * a for a in self.blocks))

    def to_json(self) -> dict:
        return {
            "dims": list(self.shape.dims),
            "ambient": self.shape.ambient,
            "blocks": [matrix_to_rows(b) for b in self.blocks],
        }

    @staticmethod
    def from_json(data: dict) -> "Element":
        shape = AlgebraShape(dims=tuple(int(d) for d in data["dims"]),
                             ambient=data.get("ambient", FINITE))
        blocks = tuple(rows_to_matrix(rows) for rows in data["blocks"])
        return Element(shape, blocks)


def zero(shape: AlgebraShape) -> Element:
    return Element(shape, tuple(np.zeros((d, d), dtype=np.complex128) for d in shape.dims))


def identity(shape: AlgebraShape) -> Element:
    return Element(shape, tuple(np.eye(d, dtype=np.complex128) for d in shape.dims))


def norm(a: Element) -> float:
    """Max over blocks of the Frobenius norm; submultiplicative."""
    return max(frobenius(b) for b in a.blocks)


def allclose(a: Element, b: Element, tol: float = 1e-12) -> bool:
    a._check_same(b)
    return norm(a - b) <= tol * (1.0 + norm(a) + norm(b))


def inverse(a: Element, tols: Tolerances = DEFAULT_TOLS) -> Element:
    """Blockwise inverse; only finite-ambient elements can be invertible."""
    if a.shape.is_infinite:
        raise NotInvertibleError("no element of the infinite ambient is invertible")
    conds = []
    for b, d in zip(a.blocks, a.shape.dims):
        if mat_rank(b, tols.rank_rel) != d:
            raise NotInvertibleError("singular block")
        conds.append(float(np.linalg.cond(b)))
    inv = Element(a.shape, tuple(np.linalg.inv(b) for b in a.blocks))
    defect = norm(a * inv - identity(a.shape))
    if defect > tols.inverse_rel * max(conds):
        raise NotInvertibleError(
            f"inverse verification failed: residual {defect:.3e}")
    return inv


def _all_eigs(a: Element) -> np.ndarray:
    return np.concatenate([eig(b) for b in a.blocks])


def tau_of(a: Element, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Distinctness tolerance for ``a`` from its spectral radius estimate."""
    values = _all_eigs(a)
    rho = float(np.max(np.abs(values))) if values.size else 0.0
    return tols.tau(rho)


def spectrum(a: Element, tols: Tolerances = DEFAULT_TOLS) -> ClusteredSpectrum:
    """Spectrum of ``a`` relative to its algebra, as clustered distinct values.

    The union of block spectra is clustered at the element's tolerance tau;
    a representative within tau of 0 is snapped to exactly 0. In the infinite
    ambient, 0 is adjoined with count 0 when no block eigenvalue sits there
    (the count-0 convention marks the ambient-forced point).
    """
    values = _all_eigs(a)
    rho = float(np.max(np.abs(values))) if values.size else 0.0
    tau = tols.tau(rho)
    spec = cluster(values, tau)

    points = list(spec.points)
    # snap the representative nearest 0 to exactly 0 when within tau
    near = [(abs(v), i) for i, (v, _) in enumerate(points) if abs(v) <= tau]
    if near:
        _, i = min(near)
        points[i] = (0.0 + 0.0j, points[i][1])
    elif a.shape.is_infinite:
        points.append((0.0 + 0.0j, 0))
    points.sort(key=lambda p: (p[0].real, p[0].imag))
    return ClusteredSpectrum(points=tuple(points), tol=tau)


def nonzero_spectrum(a: Element, tols: Tolerances = DEFAULT_TOLS) -> ClusteredSpectrum:
    """Spectrum with values of modulus at most tau removed."""
    spec = spectrum(a, tols)
    pts = tuple((v, c) for v, c in spec.points if abs(v) > spec.tol)
    return ClusteredSpectrum(points=pts, tol=spec.tol)


def count_nonzero_spectrum(a: Element, tols: Tolerances = DEFAULT_TOLS) -> int:
    return len(nonzero_spectrum(a, tols).points)


def is_singular(a: Element, tols: Tolerances = DEFAULT_TOLS) -> bool:
    """True when 0 belongs to the spectrum of ``a`` relative to its algebra."""
    if a.shape.is_infinite:
        return True
    return any(mat_rank(b, tols.rank_rel) < d
               for b, d in zip(a.blocks, a.shape.dims))


@dataclass(frozen=True, eq=False)
class ProjectionElement:
    """An idempotent element; Hermitian-ness is not required."""

    underlying: Element
    idem_tol: float = field(default=DEFAULT_TOLS.projection_idem)

    def __post_init__(self):
        p = self.underlying
        defect = norm(p * p - p)
        if defect > self.idem_tol * (1.0 + norm(p)):
            raise ValueError(f"not a projection: ||p^2 - p|| = {defect:.3e}")

    @property
    def element(self) -> Element:
        return self.underlying

    def __add__(self, other: "ProjectionElement") -> "ProjectionElement":
        # valid for mutually orthogonal projections; construction re-validates
        return ProjectionElement(self.underlying + other.underlying)


def riesz_element(a: Element, center: complex, radius: float, nodes: int = 64,
                  tols: Tolerances = DEFAULT_TOLS) -> ProjectionElement:
    """Blockwise spectral projector of ``a`` for the disk around ``center``."""
    blocks = tuple(
        riesz_projection(b, center, radius, nodes,
                         idem_tol=tols.projection_idem,
                         trace_tol=tols.projection_trace,
                         clearance=tols.contour_clearance)
        for b in a.blocks)
    return ProjectionElement(Element(a.shape, blocks))


@dataclass(frozen=True, eq=False)
class CompressedView:
    """Corner subalgebra ``pAp`` carried by per-block range bases of ``p``.

    The view algebra is the direct sum over blocks where ``p`` has positive
    rank; its identity is the compression of ``p`` itself. The compression of
    a finite-rank projection is always finite-dimensional, so the view is
    finite-ambient regardless of the ambient mode upstairs.
    """

    ambient_shape: AlgebraShape
    p: ProjectionElement
    bases: tuple[np.ndarray, ...]
    block_map: tuple[int, ...]

    @property
    def shape(self) -> AlgebraShape:
        return AlgebraShape(dims=tuple(self.bases[i].shape[1] for i in range(len(self.bases))),
                            ambient=FINITE)

    def identity(self) -> Element:
        return identity(self.shape)

    def compress(self, a: Element) -> Element:
        """Matrix of ``p a p`` restricted to range(p), in the stored bases."""
        if a.shape != self.ambient_shape:
            raise ShapeMismatchError("element does not live in the ambient algebra")
        pb = self.p.element.blocks
        out = []
        for basis, j in zip(self.bases, self.block_map):
            papj = pb[j] @ a.blocks[j] @ pb[j]
            out.append(basis.conj().T @ papj @ basis)
        return Element(self.shape, tuple(out))


def compressed_view(p: ProjectionElement, tols: Tolerances = DEFAULT_TOLS) -> CompressedView:
    """Build the corner view for ``p`` via column-pivoted QR range bases."""
    shape = p.element.shape
    bases, block_map = [], []
    for j, block in enumerate(p.element.blocks):
        r = mat_rank(block, tols.rank_rel)
        if r == 0:
            continue
        q, _, _ = scipy.linalg.qr(block, pivoting=True)
        basis = q[:, :r]
        # basis must span range(p): p acts as the identity on it
        defect = frobenius(block @ basis - basis)
        if defect > 1e-6 * (1.0 + frobenius(block)):
            raise ViewError(f"basis rank deficiency on block {j}: residual {defect:.3e}")
        bases.append(basis)
        block_map.append(j)
    if not bases:
        raise ViewError("projection has rank 0; the corner algebra is empty")
    return CompressedView(ambient_shape=shape, p=p,
                          bases=tuple(bases), block_map=tuple(block_map))


def ginibre(rng: np.random.Generator, n: int, m: int | None = None) -> np.ndarray:
    """i.i.d. standard complex Gaussian entries scaled by ``1/sqrt(n)``."""
    m = n if m is None else m
    g = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    return g / np.sqrt(2.0 * n)


def random_element(shape: AlgebraShape, rng: np.random.Generator) -> Element:
    return Element(shape, tuple(ginibre(rng, d) for d in shape.dims))


def random_socle_element(shape: AlgebraShape, target_ranks, rng: np.random.Generator) -> Element:
    """Random element with prescribed classical rank per block.

    Block ``j`` is a product of ``n_j x r_j`` and ``r_j x n_j`` Gaussian
    factors, which has rank ``r_j`` almost surely.
    """
    ranks = tuple(int(r) for r in target_ranks)
    if len(ranks) != len(shape.dims):
        raise ShapeMismatchError("one target rank per block required")
    blocks = []
    for d, r in zip(shape.dims, ranks):
        if r < 0 or r > d:
            raise ValueError(f"target rank {r} out of range for block dim {d}")
        if r == 0:
            blocks.append(np.zeros((d, d), dtype=np.complex128))
        else:
            blocks.append(ginibre(rng, d, r) @ ginibre(rng, r, d))
    return Element(shape, tuple(blocks))
