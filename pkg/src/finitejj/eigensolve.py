"""Lowest eigenpairs of a symmetric tridiagonal operator at any dimension.

The workhorse is bisection on the Sturm pivot count: the number of negative
pivots in the shifted LDL^T recurrence equals the number of eigenvalues
below the shift, so every returned value carries a certificate (exactly j
eigenvalues below its bracket).  Pivot counting streams the coefficients in
fixed-size chunks, costing O(dim) time and O(1) memory per evaluation, which
is what makes island sizes of order 5e8 tractable.

Eigenvectors come from inverse iteration seeded with the certified value;
a dense full-spectrum routine (LAPACK, via scipy) provides the reference
oracle at small dimensions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.linalg.lapack import dgttrf, dgttrs

from .errors import CapacityError, ConvergenceError, NearDegenerateWarning
from .hamiltonian import DENSE_LIMIT, TridiagonalHamiltonian

CHUNK = 1 << 16
MAX_BISECTIONS = 2048
MAX_INVERSE_ITERATIONS = 50

_SAFMIN = np.finfo(float).tiny
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EigenPair:
    """One eigenvalue, optionally with its unit-norm real eigenvector."""

    value: float
    vector: np.ndarray | None
    residual: float


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues E_0 <= E_1 <= ... over the operator's window."""

    pairs: list[EigenPair]
    dim: int
    converged: bool

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.pairs])


def _pivmin(h: TridiagonalHamiltonian) -> float:
    _, _, off_max = h.coefficient_bounds()
    return _SAFMIN * max(1.0, off_max * off_max)


def eigenvalue_count_below(h: TridiagonalHamiltonian, x: float) -> int:
    """Number of eigenvalues strictly below ``x`` (Sturm pivot count)."""
    pivmin = _pivmin(h)
    count = 0
    d = 1.0
    dim = h.dim
    for start in range(0, dim, CHUNK):
        stop = min(start + CHUNK, dim)
        diag = (h.diagonal_block(start, stop) - x).tolist()
        if start == 0:
            offsq = np.empty(stop - start)
            offsq[0] = 0.0
            if stop > 1:
                np.square(h.offdiagonal_block(0, stop - 1), out=offsq[1:])
        else:
            offsq = np.square(h.offdiagonal_block(start - 1, stop - 1))
        offsq_list = offsq.tolist()
        for dj, oj in zip(diag, offsq_list):
            d = dj - oj / d
            if abs(d) <= pivmin:
                d = -pivmin
            if d < 0.0:
                count += 1
    return count


def lowest_eigenvalues(
    h: TridiagonalHamiltonian, k: int, tol: float | None = None
) -> Spectrum:
    """The k smallest eigenvalues by certified bisection.

    Each value is the midpoint of a bracket [lo, hi] with pivot counts
    count(lo) <= j and count(hi) >= j+1, refined until the bracket width
    drops below max(tol, a few ulps of the endpoints).  ``tol`` is an
    absolute energy tolerance; None converges to the floating-point floor.

    Fixed evaluation order makes results bitwise reproducible.
    """
    if k < 1 or k > h.dim:
        raise ValueError(f"k must be in [1, {h.dim}], got {k}")
    if tol is not None and not tol > 0:
        raise ValueError("tol must be positive")
    dmin, dmax, off_max = h.coefficient_bounds()
    lo0 = dmin - 2.0 * off_max
    hi0 = dmax + 2.0 * off_max
    # Known pivot counts, kept sorted for warm bracket starts.
    known: list[tuple[float, int]] = [(lo0, 0), (hi0, h.dim)]

    abs_tol = 0.0 if tol is None else tol
    pairs: list[EigenPair] = []
    converged = True
    for j in range(k):
        lo = max((x for x, c in known if c <= j), default=lo0)
        hi = min((x for x, c in known if c >= j + 1), default=hi0)
        width = hi - lo
        for _ in range(MAX_BISECTIONS):
            floor = 2.0 * _EPS * (abs(lo) + abs(hi)) + 2.0 * _SAFMIN
            if width <= max(abs_tol, floor):
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            c = eigenvalue_count_below(h, mid)
            known.append((mid, c))
            if c >= j + 1:
                hi = mid
            else:
                lo = mid
            width = hi - lo
        else:
            raise ConvergenceError(
                f"bisection for eigenvalue {j} stalled at bracket width {width}",
                achieved=width,
            )
        if tol is not None and width > tol:
            converged = False
        pairs.append(EigenPair(value=0.5 * (lo + hi), vector=None, residual=0.5 * width))
    return Spectrum(pairs=pairs, dim=h.dim, converged=converged)


def _spectral_scale(h: TridiagonalHamiltonian) -> float:
    dmin, dmax, off_max = h.coefficient_bounds()
    return max(abs(dmin), abs(dmax)) + 2.0 * off_max


def _inverse_iteration(
    h: TridiagonalHamiltonian,
    value: float,
    prev: tuple[np.ndarray, ...] = (),
    residual_target: float | None = None,
) -> tuple[np.ndarray, float]:
    """Inverse iteration at a fixed certified shift.

    Re-orthogonalizes against ``prev`` each sweep (used when levels cluster).
    Returns the sign-normalized vector and its residual ||Hv - value*v||.
    """
    dim = h.dim
    scale = _spectral_scale(h)
    if residual_target is None:
        residual_target = 64.0 * _EPS * scale * math.sqrt(dim)
    diag, off = h.to_arrays()
    if dim == 1:
        v = np.ones(1)
        return v, abs(diag[0] - value)
    if dim == 2:
        # Closed form; the LAPACK gt factorization wrapper rejects n = 2.
        row = (off[0], value - diag[0])
        alt = (value - diag[1], off[0])
        v = np.array(row if abs(row[1]) >= abs(alt[0]) else alt)
        v /= np.linalg.norm(v)
        imax = int(np.argmax(np.abs(v)))
        if v[imax] < 0:
            v = -v
        return v, float(np.linalg.norm(h.matvec(v) - value * v))

    shift = value
    for attempt in range(3):
        dl, d, du, du2, ipiv, info = dgttrf(off, diag - shift, off)
        if info == 0:
            break
        # Exact singularity: nudge the shift by a few ulps and refactor.
        shift = value + (attempt + 1) * 4.0 * _EPS * max(scale, abs(value))
    else:
        raise ConvergenceError("shifted tridiagonal factorization failed")

    v = np.full(dim, 1.0 / math.sqrt(dim))
    residual = math.inf
    for _ in range(MAX_INVERSE_ITERATIONS):
        w, info = dgttrs(dl, d, du, du2, ipiv, v)
        if info != 0:
            raise ConvergenceError(f"tridiagonal solve failed (info={info})")
        for u in prev:
            w -= np.dot(u, w) * u
        norm = np.linalg.norm(w)
        if norm == 0.0 or not np.isfinite(norm):
            # Restart from a deterministic pseudo-random direction.
            rng = np.random.default_rng(dim)
            v = rng.standard_normal(dim)
            v /= np.linalg.norm(v)
            continue
        v = w / norm
        residual = float(np.linalg.norm(h.matvec(v) - value * v))
        if residual <= residual_target:
            break
    else:
        raise ConvergenceError(
            f"inverse iteration residual {residual} above target {residual_target}",
            achieved=residual,
        )
    imax = int(np.argmax(np.abs(v)))
    if v[imax] < 0:
        v = -v
    return v, residual


def ground_state(h: TridiagonalHamiltonian, tol: float | None = None) -> EigenPair:
    """Ground eigenpair: certified value plus inverse-iteration vector.

    The vector is sign-normalized so its largest-magnitude component is
    positive; with all couplings negative it then comes out componentwise
    positive (Perron-Frobenius).  Warns when E_1 - E_0 is within 10x the
    tolerance, where the vector is ill-conditioned.
    """
    k = min(2, h.dim)
    spectrum = lowest_eigenvalues(h, k, tol)
    e0 = spectrum.pairs[0].value
    if k == 2:
        gap = spectrum.pairs[1].value - e0
        gap_floor = 10.0 * max(tol or 0.0, 4.0 * _EPS * _spectral_scale(h))
        if gap < gap_floor:
            warnings.warn(
                f"levels nearly degenerate (gap {gap:.3e}); ground vector may be ill-conditioned",
                NearDegenerateWarning,
                stacklevel=2,
            )
    # The residual cannot drop below the eigenvalue's own bracket error.
    floor = 64.0 * _EPS * _spectral_scale(h) * math.sqrt(h.dim)
    target = max(tol or 0.0, floor)
    vector, residual = _inverse_iteration(h, e0, residual_target=target)
    return EigenPair(value=e0, vector=vector, residual=residual)


def dense_all(h: TridiagonalHamiltonian, dense_limit: int = DENSE_LIMIT) -> Spectrum:
    """Full spectrum with eigenvectors via the dense LAPACK tridiagonal path.

    Reference oracle for small dimensions; the limit keeps runtimes around a
    second and is adjustable.
    """
    if h.dim > dense_limit:
        raise CapacityError(f"dim {h.dim} exceeds dense limit {dense_limit}")
    diag, off = h.to_arrays()
    if h.dim == 1:
        return Spectrum(
            pairs=[EigenPair(value=float(diag[0]), vector=np.ones(1), residual=0.0)],
            dim=1,
            converged=True,
        )
    values, vectors = eigh_tridiagonal(diag, off)
    pairs = []
    for j in range(h.dim):
        v = vectors[:, j]
        imax = int(np.argmax(np.abs(v)))
        if v[imax] < 0:
            v = -v
        residual = float(np.linalg.norm(h.matvec(v) - values[j] * v))
        pairs.append(EigenPair(value=float(values[j]), vector=v, residual=residual))
    return Spectrum(pairs=pairs, dim=h.dim, converged=True)
