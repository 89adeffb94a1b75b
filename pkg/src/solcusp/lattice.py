"""Compact Sol 3-manifold cross sections as mapping tori.

A hyperbolic (Anosov) integer matrix A with det = 1 and |trace| > 2 acts
on the 2-torus; its mapping torus carries Sol geometry

    g_Sol = dz^2 + e^(-2z) dx^2 + e^(2z) dy^2

once the (x, y) plane is written in the eigenbasis of A.  The deck group
of the quotient is generated by two planar translations (the images of
the standard Z^2 basis in eigen-coordinates) and the monodromy
(x, y, z) |-> (lam x, y/lam, z + L) with L = log|lam| the stretch.
Every generator must be an exact isometry of g_Sol, which
``verify_isometry`` checks by pure pullback algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

__all__ = [
    "AnosovMatrix",
    "AffineMap3",
    "SolLattice",
    "build_sol_lattice",
    "verify_isometry",
    "cross_section_volume",
    "sol_metric_3d",
    "default_samples",
]


@dataclass(frozen=True)
class AnosovMatrix:
    """2x2 integer matrix (a, b; c, d) with det = 1 and |trace| > 2."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        for v in (self.a, self.b, self.c, self.d):
            if int(v) != v:
                raise ValueError("entries must be integers")
        if self.det != 1:
            raise ValueError(f"determinant must be 1, got {self.det}")
        if abs(self.trace) <= 2:
            raise ValueError(
                f"|trace| must exceed 2 for hyperbolicity, got {self.trace}"
            )

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def eigenvalues(self) -> tuple[float, float]:
        """(lam, 1/lam) with |lam| > 1, by the quadratic formula."""
        tr = float(self.trace)
        disc = np.sqrt(tr * tr - 4.0)
        lam = (tr + np.sign(tr) * disc) / 2.0
        return lam, 1.0 / lam

    @property
    def stretch(self) -> float:
        """log of the expanding eigenvalue modulus."""
        return float(np.log(abs(self.eigenvalues()[0])))


@dataclass(frozen=True)
class AffineMap3:
    """p |-> linear @ p + offset on (x, y, z)."""

    linear: np.ndarray
    offset: np.ndarray

    def __post_init__(self) -> None:
        lin = np.asarray(self.linear, dtype=float).reshape(3, 3)
        off = np.asarray(self.offset, dtype=float).reshape(3)
        if abs(np.linalg.det(lin)) < 1e-12:
            raise ValueError("linear part must be invertible")
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "offset", off)
        lin.setflags(write=False)
        off.setflags(write=False)

    def apply(self, p) -> np.ndarray:
        return self.linear @ np.asarray(p, dtype=float) + self.offset

    def compose(self, other: "AffineMap3") -> "AffineMap3":
        """self after other: (self . other)(p) = self(other(p))."""
        return AffineMap3(
            self.linear @ other.linear,
            self.linear @ other.offset + self.offset,
        )


@dataclass(frozen=True)
class SolLattice:
    """Cross-section data: monodromy matrix, stretch, plane lattice, deck maps."""

    matrix: AnosovMatrix
    stretch: float
    basis: np.ndarray                 # rows: the two planar lattice vectors
    generators: list[AffineMap3] = field(default_factory=list)

    def __post_init__(self) -> None:
        b = np.asarray(self.basis, dtype=float).reshape(2, 2)
        object.__setattr__(self, "basis", b)
        b.setflags(write=False)


def sol_metric_3d(p) -> np.ndarray:
    """g_Sol at (x, y, z): diag(e^(-2z), e^(2z), 1)."""
    z = float(np.asarray(p, dtype=float)[2])
    return np.diag([np.exp(-2.0 * z), np.exp(2.0 * z), 1.0])


def default_samples() -> list[np.ndarray]:
    """27-point lattice on {-1, 0, 1}^3; pullback deviation is z-only."""
    return [np.array(q, dtype=float) for q in product((-1.0, 0.0, 1.0), repeat=3)]


def build_sol_lattice(A: AnosovMatrix) -> SolLattice:
    """Mapping-torus lattice for A, eigenbasis scaled to a unit-area cell.

    The two eigenvectors are scaled by a common factor making the planar
    fundamental parallelogram have area 1, so the cross-section volume
    equals the stretch L.  For trace < -2 the expanding eigenvalue is
    negative and the monodromy linear part is diag(lam, 1/lam, 1) with
    lam < -1; it is an isometry of g_Sol either way since the metric
    coefficients are quadratic in dx, dy.
    """
    lam, lam_inv = A.eigenvalues()
    L = A.stretch

    # eigenvector for an eigenvalue mu: (b, mu - a), or (mu - d, c) if b = 0
    def eigvec(mu: float) -> np.ndarray:
        if A.b != 0:
            return np.array([float(A.b), mu - A.a])
        return np.array([mu - A.d, float(A.c)])

    vp = eigvec(lam)
    vm = eigvec(lam_inv)
    P = np.column_stack([vp, vm])
    P /= np.sqrt(abs(np.linalg.det(P)))
    P_inv = np.linalg.inv(P)

    b1 = P_inv @ np.array([1.0, 0.0])
    b2 = P_inv @ np.array([0.0, 1.0])

    def translation(v: np.ndarray) -> AffineMap3:
        return AffineMap3(np.eye(3), np.array([v[0], v[1], 0.0]))

    monodromy = AffineMap3(
        np.diag([lam, lam_inv, 1.0]),
        np.array([0.0, 0.0, L]),
    )
    lat = SolLattice(
        matrix=A,
        stretch=L,
        basis=np.vstack([b1, b2]),
        generators=[translation(b1), translation(b2), monodromy],
    )

    dev = max(verify_isometry(m, default_samples()) for m in lat.generators)
    if dev > 1e-12:
        raise AssertionError(
            f"deck generator fails the isometry check: deviation {dev:.3e}"
        )
    return lat


def verify_isometry(m: AffineMap3, samples) -> float:
    """Max operator-norm deviation of the g_Sol pullback over the samples.

    Pure algebra: (m* g)(p) = J^T g(m(p)) J with J the constant linear
    part, compared against g(p).  For a genuine deck map the deviation is
    rounding noise (<= 1e-12); no differencing enters.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("samples must be nonempty")
    J = m.linear
    worst = 0.0
    for p in samples:
        pulled = J.T @ sol_metric_3d(m.apply(p)) @ J
        dev = np.linalg.norm(pulled - sol_metric_3d(p), 2)
        worst = max(worst, float(dev))
    return worst


def cross_section_volume(lat: SolLattice) -> float:
    """Volume of the cross section: stretch x planar cell area.

    g_Sol has unit volume density (det = e^(-2z) e^(2z) = 1), so the
    volume reduces to the area of the (x, y) fundamental parallelogram
    times the z-extent L.
    """
    area = abs(float(np.linalg.det(lat.basis)))
    return float(lat.stretch) * area
