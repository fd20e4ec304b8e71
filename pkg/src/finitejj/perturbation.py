"""Closed-form results for both qubit regimes, plus their numeric first-order origin.

Charge regime (E_J/E_C << 1): degenerate two-level reduction at the
half-way offsets between adjacent charge states, giving the gap

    (E_J / 2N) sqrt((1 + 2N)^2 - 4 n_g^2)

and the matching susceptibility peak 2 N E_C / (E_J sqrt((1+2N)^2 - 4 n_g^2)).

Transmon regime (E_J/E_C >> 1): a spin-to-boson mapping expanded about the
maximally tunneling state, an affine Bogoliubov rotation with level spacing
eps = sqrt(2 E_C E_J + E_J^2/N^2), and first-order corrections that collapse
to sqrt(2 E_C E_J) [1 - (n_g/2N)^2] and d<n>/dn_g = 1 - 3 E_J n_g^2/(4 E_C N^4)
for 1 << E_J/E_C << N^2.  ``transmon_first_order_numeric`` evaluates the
corrections without the final limit by pushing the ladder polynomials through
the normal-ordering engine, so the gap between the exact first-order numbers
and the asymptotic formulas stays measurable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from . import wick
from .errors import RegimeWarning
from .model import CircuitParams
from .wick import OperatorPoly

_DEGENERACY_TOL = 1e-9

# Regime warning thresholds.
CPB_RATIO_MAX = 0.1
TRANSMON_RATIO_MIN = 10.0


@dataclass(frozen=True)
class TwoLevelEffective:
    """Projection onto the two nearly degenerate charge states around n_g."""

    floor_n: float
    ceil_n: float
    sigma_x_coeff: float
    diag: tuple[float, float]

    def gap(self) -> float:
        """Exact spectral gap of the 2x2 block."""
        half_split = 0.5 * (self.diag[1] - self.diag[0])
        return 2.0 * math.hypot(half_split, self.sigma_x_coeff)


@dataclass(frozen=True)
class BogoliubovCoeffs:
    """Affine Bogoliubov rotation diagonalizing the quadratic transmon problem."""

    u_plus: float
    u_minus: float
    u_0: float
    epsilon: float


def _basis_floor_ceil(params: CircuitParams) -> tuple[float, float]:
    """Nearest basis charges below and above n_g (lattice spacing 1)."""
    n = params.n_half
    offset = params.n_g + n  # position in units of the lattice, 0 at n = -N
    nearest = round(offset)
    if abs(offset - nearest) <= _DEGENERACY_TOL:
        raise ValueError(
            f"n_g = {params.n_g} coincides with a basis charge; no two-state degeneracy"
        )
    k_floor = math.floor(offset)
    if k_floor < 0 or k_floor + 1 > params.pairs_total:
        raise ValueError(f"n_g = {params.n_g} outside the open interval (-N, N)")
    return k_floor - n, k_floor + 1 - n


def cpb_effective(params: CircuitParams) -> TwoLevelEffective:
    """Two-level reduction in span{|floor(n_g)>, |ceil(n_g)>}."""
    floor_n, ceil_n = _basis_floor_ceil(params)
    n = params.n_half
    coupling = -(params.e_j / (2.0 * n)) * math.sqrt(n * (n + 1.0) - floor_n * ceil_n)
    diag = (
        params.e_c * (floor_n - params.n_g) ** 2,
        params.e_c * (ceil_n - params.n_g) ** 2,
    )
    return TwoLevelEffective(floor_n=floor_n, ceil_n=ceil_n, sigma_x_coeff=coupling, diag=diag)


def _require_degeneracy_point(params: CircuitParams):
    """n_g must sit half-way between adjacent charges, i.e. in {-N+1/2, ..., N-1/2}."""
    offset = params.n_g + params.n_half - 0.5
    nearest = round(offset)
    if abs(offset - nearest) > _DEGENERACY_TOL or not 0 <= nearest <= params.pairs_total - 1:
        raise ValueError(
            f"n_g = {params.n_g} is not a degeneracy point of the 2N = "
            f"{params.pairs_total} basis"
        )


def _warn_cpb_regime(params: CircuitParams):
    ratio = params.e_j / params.e_c
    if ratio >= CPB_RATIO_MAX:
        warnings.warn(
            f"charge-regime formula used at E_J/E_C = {ratio:.3g} (trusted well below "
            f"{CPB_RATIO_MAX})",
            RegimeWarning,
            stacklevel=3,
        )


def cpb_gap(params: CircuitParams) -> float:
    """Degeneracy-point gap (E_J / 2N) sqrt((1 + 2N)^2 - 4 n_g^2)."""
    _require_degeneracy_point(params)
    _warn_cpb_regime(params)
    two_n = 2.0 * params.n_half
    return (params.e_j / two_n) * math.sqrt((1.0 + two_n) ** 2 - 4.0 * params.n_g**2)


def cpb_susceptibility(params: CircuitParams) -> float:
    """Degeneracy-point susceptibility peak 2 N E_C / (E_J sqrt((1+2N)^2 - 4 n_g^2))."""
    _require_degeneracy_point(params)
    _warn_cpb_regime(params)
    two_n = 2.0 * params.n_half
    return (two_n * params.e_c) / (
        params.e_j * math.sqrt((1.0 + two_n) ** 2 - 4.0 * params.n_g**2)
    )


def bogoliubov(params: CircuitParams) -> BogoliubovCoeffs:
    """Rotation coefficients u_+/-, displacement u_0, and level spacing eps."""
    n = params.n_half
    eps = math.sqrt(2.0 * params.e_c * params.e_j + (params.e_j / n) ** 2)
    denom = math.sqrt(4.0 * n * eps * params.e_j)
    return BogoliubovCoeffs(
        u_plus=(params.e_j + n * eps) / denom,
        u_minus=(params.e_j - n * eps) / denom,
        u_0=params.n_g * math.sqrt(2.0 * params.e_c**2 * params.e_j / eps**3),
        epsilon=eps,
    )


def _warn_transmon_regime(params: CircuitParams):
    ratio = params.e_j / params.e_c
    n_sq = params.n_half**2
    if ratio <= TRANSMON_RATIO_MIN or ratio >= n_sq / 100.0:
        warnings.warn(
            f"transmon formula used at E_J/E_C = {ratio:.3g}, N^2 = {n_sq:.3g}; trusted for "
            f"{TRANSMON_RATIO_MIN} < E_J/E_C < N^2/100",
            RegimeWarning,
            stacklevel=3,
        )
    elif abs(params.n_g) > params.n_half:
        warnings.warn(
            f"transmon formula extrapolated past the basis edge (|n_g| = {abs(params.n_g):.3g} "
            f"> N = {params.n_half:.3g})",
            RegimeWarning,
            stacklevel=3,
        )


def transmon_frequency(params: CircuitParams) -> float:
    """sqrt(2 E_C E_J) [1 - (n_g / 2N)^2]."""
    _warn_transmon_regime(params)
    return math.sqrt(2.0 * params.e_c * params.e_j) * (
        1.0 - (params.n_g / (2.0 * params.n_half)) ** 2
    )


def transmon_susceptibility(params: CircuitParams) -> float:
    """1 - 3 E_J n_g^2 / (4 E_C N^4)."""
    _warn_transmon_regime(params)
    return 1.0 - 3.0 * params.e_j * params.n_g**2 / (4.0 * params.e_c * params.n_half**4)


@dataclass(frozen=True)
class FirstOrderResult:
    """First-order transmon corrections evaluated without the asymptotic limit."""

    frequency: float
    imbalance: float


def _perturbation_poly(params: CircuitParams) -> OperatorPoly:
    """Cross term of the perturbation, E_C sqrt(N) (p' dSz + dSz p'), in the bare mode.

    dSz is the first-order Taylor remainder of the spin z component,
    -a^dag p a / sqrt(16 N), and p' = p - n_g/sqrt(N) the shifted momentum.
    """
    n = params.n_half
    a = OperatorPoly.lowering()
    a_dag = OperatorPoly.raising()
    p = OperatorPoly.momentum()
    p_shift = p - OperatorPoly.identity(params.n_g / math.sqrt(n))
    d_sz = (-1.0 / math.sqrt(16.0 * n)) * (a_dag * p * a)
    return (params.e_c * math.sqrt(n)) * (p_shift * d_sz + d_sz * p_shift)


def transmon_first_order_numeric(params: CircuitParams) -> FirstOrderResult:
    """Evaluate the first-order frequency and imbalance through the wick engine.

    The perturbation (quadratic-order spin remainder dropped) is rewritten in
    the quasiparticle frame by the exact affine substitution, and every matrix
    element reduces to a vacuum expectation of a normal-ordered polynomial.
    The ground-state correction only reaches excitation numbers up to four,
    since the perturbation has degree four, so that sum is exact.
    """
    _warn_transmon_regime(params)
    n = params.n_half
    coeffs = bogoliubov(params)
    eps = coeffs.epsilon

    delta_h = wick.substitute_affine(
        _perturbation_poly(params), coeffs.u_plus, coeffs.u_minus, coeffs.u_0
    )
    b = OperatorPoly.lowering()
    b_dag = OperatorPoly.raising()

    freq = (
        eps
        + wick.vacuum_expectation(b * delta_h * b_dag).real
        - wick.vacuum_expectation(delta_h).real
    )

    momentum_term = wick.substitute_affine(
        math.sqrt(n) * OperatorPoly.momentum(), coeffs.u_plus, coeffs.u_minus, coeffs.u_0
    )
    a = OperatorPoly.lowering()
    a_dag = OperatorPoly.raising()
    d_sz = wick.substitute_affine(
        (-1.0 / math.sqrt(16.0 * n)) * (a_dag * OperatorPoly.momentum() * a),
        coeffs.u_plus,
        coeffs.u_minus,
        coeffs.u_0,
    )

    imbalance = wick.vacuum_expectation(momentum_term).real
    imbalance += wick.vacuum_expectation(d_sz).real

    factorial = 1.0
    for k in range(1, 5):
        factorial *= k
        amp = wick.vacuum_expectation((b**k) * delta_h)  # <0| b^k dH |0>
        bra = wick.vacuum_expectation(momentum_term * (b_dag**k))  # <0| sqrt(N) p (b^dag)^k |0>
        imbalance += 2.0 * (bra * amp / (-factorial * k * eps)).real

    return FirstOrderResult(frequency=freq, imbalance=imbalance)
