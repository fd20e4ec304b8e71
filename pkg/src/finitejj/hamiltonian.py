"""Charge-basis Hamiltonian as a symmetric tridiagonal operator.

In the basis of population-imbalance eigenstates |n>, n in {-N, ..., N},
the junction Hamiltonian has diagonal entries ``E_C (n - n_g)^2`` and
couplings ``-(E_J / 2N) sqrt(N(N+1) - n(n+1))`` between n and n+1.

Coefficients are computed on demand from the parameters and the index, so
the operator never materializes storage: dimensions of order 5e8 stream
through the eigensolver's pivot counts without allocation.  Internally the
basis is indexed by the integer offset ``k = n + N`` in [0, 2N]; the square
root argument then factors as ``(2N - k)(k + 1)``, which stays
cancellation-free for n near the boundary at any island size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .model import CircuitParams

# Largest dimension for dense (matrix) materialization.
DENSE_LIMIT = 4001
# Largest dimension for one-dimensional coefficient arrays.
ARRAY_LIMIT = 1 << 26

_LATTICE_TOL = 1e-9


@dataclass(frozen=True)
class ChargeWindow:
    """Contiguous sub-range [n_lo, n_hi] of the physical charge basis."""

    n_lo: float
    n_hi: float

    @classmethod
    def full(cls, n_half: float) -> "ChargeWindow":
        return cls(-n_half, n_half)

    @classmethod
    def centered(cls, n_half: float, center: float, half_width: int) -> "ChargeWindow":
        """Window of the given half-width around the basis point nearest ``center``.

        Clipped to [-N, N]; a half-width covering the whole basis yields the
        full window.
        """
        if half_width < 0:
            raise ValueError("half_width must be non-negative")
        k_c = int(round(center + n_half))  # integer offset of the nearest basis point
        k_c = min(max(k_c, 0), int(round(2 * n_half)))
        k_lo = max(k_c - half_width, 0)
        k_hi = min(k_c + half_width, int(round(2 * n_half)))
        return cls(k_lo - n_half, k_hi - n_half)

    def span(self) -> float:
        return self.n_hi - self.n_lo


class TridiagonalHamiltonian:
    """Matrix-free symmetric tridiagonal operator over a charge window.

    Local index i in [0, dim) addresses charge ``n = n_lo + i``.
    ``diagonal(i)`` is exact up to floating point; ``offdiagonal(i)`` couples
    local states i and i+1 and is strictly negative away from the physical
    boundary, where it vanishes.
    """

    __slots__ = ("params", "window", "_k_lo", "_k_hi", "_center", "dim")

    def __init__(self, params: CircuitParams, window: ChargeWindow):
        two_n = params.pairs_total
        k_lo = round(window.n_lo + params.n_half)
        k_hi = round(window.n_hi + params.n_half)
        if abs(window.n_lo + params.n_half - k_lo) > _LATTICE_TOL or abs(
            window.n_hi + params.n_half - k_hi
        ) > _LATTICE_TOL:
            raise ValueError("window bounds must sit on the charge lattice")
        if k_lo < 0 or k_hi > two_n or k_lo > k_hi:
            raise ValueError(
                f"window [{window.n_lo}, {window.n_hi}] outside physical basis "
                f"[{-params.n_half}, {params.n_half}]"
            )
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "_k_lo", int(k_lo))
        object.__setattr__(self, "_k_hi", int(k_hi))
        # One rounding for n - n_g = k - center, same value at every index.
        object.__setattr__(self, "_center", params.n_half + params.n_g)
        object.__setattr__(self, "dim", int(k_hi - k_lo) + 1)

    def __setattr__(self, name, value):
        raise AttributeError("TridiagonalHamiltonian is immutable")

    @property
    def is_full_window(self) -> bool:
        return self._k_lo == 0 and self._k_hi == self.params.pairs_total

    def charge(self, i: int) -> float:
        return (self._k_lo + i) - self.params.n_half

    def charges(self) -> np.ndarray:
        if self.dim > ARRAY_LIMIT:
            raise CapacityError(f"dim {self.dim} exceeds array limit {ARRAY_LIMIT}")
        return (self._k_lo + np.arange(self.dim, dtype=float)) - self.params.n_half

    def diagonal(self, i: int) -> float:
        delta = (self._k_lo + i) - self._center
        return self.params.e_c * delta * delta

    def offdiagonal(self, i: int) -> float:
        """Coupling between local states i and i+1 (defined for i < dim - 1)."""
        k = self._k_lo + i
        two_n = self.params.pairs_total
        return (
            -(self.params.e_j / (2.0 * self.params.n_half))
            * ((two_n - k) * (k + 1.0)) ** 0.5
        )

    def diagonal_block(self, lo: int, hi: int) -> np.ndarray:
        """diag values for local indices [lo, hi), vectorized."""
        k = self._k_lo + np.arange(lo, hi, dtype=float)
        delta = k - self._center
        return self.params.e_c * delta * delta

    def offdiagonal_block(self, lo: int, hi: int) -> np.ndarray:
        """offdiag values for local indices [lo, hi), each coupling i to i+1."""
        k = self._k_lo + np.arange(lo, hi, dtype=float)
        two_n = self.params.pairs_total
        return -(self.params.e_j / (2.0 * self.params.n_half)) * np.sqrt(
            (two_n - k) * (k + 1.0)
        )

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Materialize (diag, offdiag) arrays; guarded by the array limit."""
        if self.dim > ARRAY_LIMIT:
            raise CapacityError(f"dim {self.dim} exceeds array limit {ARRAY_LIMIT}")
        return self.diagonal_block(0, self.dim), self.offdiagonal_block(0, self.dim - 1)

    def to_dense(self) -> np.ndarray:
        if self.dim > DENSE_LIMIT:
            raise CapacityError(f"dim {self.dim} exceeds dense limit {DENSE_LIMIT}")
        diag, off = self.to_arrays()
        return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        diag, off = self.to_arrays()
        out = diag * v
        if self.dim > 1:
            out[:-1] += off * v[1:]
            out[1:] += off * v[:-1]
        return out

    def coefficient_bounds(self) -> tuple[float, float, float]:
        """(min diag, max diag, max |offdiag|) in closed form, O(1).

        The diagonal is a parabola in the offset k with vertex at the window
        center; |offdiag|^2 = (E_J/2N)^2 (2N-k)(k+1) is concave with vertex
        at k = (2N-1)/2.  Extremes therefore sit at clamped vertices or window
        endpoints.
        """
        lo_k, hi_k = self._k_lo, self._k_hi
        vertex = min(max(int(round(self._center)), lo_k), hi_k)
        dmin = min(self.diagonal(vertex - lo_k), self.diagonal(0), self.diagonal(self.dim - 1))
        dmax = max(self.diagonal(0), self.diagonal(self.dim - 1))
        if self.dim == 1:
            return dmin, dmax, 0.0
        two_n = self.params.pairs_total
        candidates = {lo_k, hi_k - 1}
        mid = (two_n - 1) // 2
        for k in (mid, mid + 1):
            if lo_k <= k <= hi_k - 1:
                candidates.add(k)
        off_max = max(abs(self.offdiagonal(k - lo_k)) for k in candidates)
        return dmin, dmax, off_max


def build(params: CircuitParams) -> TridiagonalHamiltonian:
    """Full-basis operator; coefficient access never allocates."""
    return TridiagonalHamiltonian(params, ChargeWindow.full(params.n_half))


def build_windowed(params: CircuitParams, window: ChargeWindow) -> TridiagonalHamiltonian:
    """Operator restricted to a charge window, coefficients unchanged."""
    return TridiagonalHamiltonian(params, window)


@dataclass(frozen=True)
class SpinMatrices:
    """Dense spin-N matrices in the charge basis, ordered by increasing n."""

    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray


def spin_matrices(n_half: float, dense_limit: int = DENSE_LIMIT) -> SpinMatrices:
    """Spin components whose ladder structure generates the couplings.

    s_z is diag(n); the raising operator carries sqrt(N(N+1) - n(n+1))
    between neighbors, and s_x, s_y follow from the ladder combination.
    With basis ordered by increasing n, reversing the basis of the N = 1/2
    matrices recovers the conventional half-Pauli triple.
    """
    two_n = int(round(2 * n_half))
    if abs(2 * n_half - two_n) > _LATTICE_TOL or two_n < 1:
        raise ValueError(f"2*n_half must be a positive integer, got {2 * n_half}")
    dim = two_n + 1
    if dim > dense_limit:
        raise CapacityError(f"dim {dim} exceeds dense limit {dense_limit}")
    n = np.arange(dim, dtype=float) - n_half
    ladder = np.sqrt((n_half - n[:-1]) * (n_half + n[:-1] + 1.0))
    s_plus = np.zeros((dim, dim), dtype=complex)
    s_plus[np.arange(1, dim), np.arange(dim - 1)] = ladder
    s_minus = s_plus.conj().T
    return SpinMatrices(
        sx=0.5 * (s_plus + s_minus),
        sy=(s_plus - s_minus) / 2j,
        sz=np.diag(n).astype(complex),
    )


def export_table(h: TridiagonalHamiltonian, destination) -> None:
    """Write a three-column debug table (n, diag, offdiag) to a path or file.

    The offdiag column holds the coupling n <-> n+1; the last row's entry is
    blank since no coupling leaves the window there.
    """
    diag, off = h.to_arrays()
    charges = h.charges()
    lines = ["# n diag offdiag"]
    for i in range(h.dim):
        tail = format(off[i], ".17g") if i < h.dim - 1 else ""
        lines.append(f"{charges[i]:.17g} {diag[i]:.17g} {tail}".rstrip())
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w") as fh:
            fh.write(text)
