"""Measured quantities: qubit frequency, imbalance, susceptibility, sweeps.

Large islands are handled through charge windows: the low-energy states are
exponentially localized around the offset charge, so a window of a few dozen
charge states around round(n_g) reproduces full-basis answers to near machine
precision.  The adaptive policy doubles the half-width until the observable
stops moving, and every result remembers whether that check passed.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import RegimeWarning, StepInstabilityWarning, WindowConvergenceError
from .eigensolve import ground_state, lowest_eigenvalues
from .hamiltonian import ChargeWindow, TridiagonalHamiltonian, build, build_windowed
from .model import CircuitParams

DEFAULT_WINDOW_RTOL = 1e-9
DEFAULT_W_MAX = 1 << 22


@dataclass(frozen=True)
class WindowPolicy:
    """How to restrict the charge basis before solving.

    mode "full" solves the whole basis; "fixed" uses one half-width;
    "adaptive" starts from ``w_initial`` (default: four charge-state standard
    deviations of the localized ground state, at least 16) and doubles until
    the observable changes by less than ``rtol`` or ``w_max`` is hit.
    """

    mode: str = "adaptive"
    half_width: int | None = None
    rtol: float = DEFAULT_WINDOW_RTOL
    w_initial: int | None = None
    w_max: int = DEFAULT_W_MAX

    def __post_init__(self):
        if self.mode not in ("full", "fixed", "adaptive"):
            raise ValueError(f"unknown window mode {self.mode!r}")
        if self.mode == "fixed" and (self.half_width is None or self.half_width < 0):
            raise ValueError("fixed mode needs a non-negative half_width")
        if self.w_initial is not None and self.w_initial < 4:
            raise ValueError("w_initial must be at least 4")
        if self.mode == "adaptive" and not self.rtol > 0:
            raise ValueError("adaptive mode needs rtol > 0")

    @classmethod
    def full(cls) -> "WindowPolicy":
        return cls(mode="full")

    @classmethod
    def fixed(cls, half_width: int) -> "WindowPolicy":
        return cls(mode="fixed", half_width=half_width)

    @classmethod
    def adaptive(
        cls,
        rtol: float = DEFAULT_WINDOW_RTOL,
        w_initial: int | None = None,
        w_max: int = DEFAULT_W_MAX,
    ) -> "WindowPolicy":
        return cls(mode="adaptive", rtol=rtol, w_initial=w_initial, w_max=w_max)


DEFAULT_POLICY = WindowPolicy()


def initial_half_width(params: CircuitParams) -> int:
    """Four standard deviations of the harmonic ground state's charge spread."""
    sigma = (params.e_j / (8.0 * params.e_c)) ** 0.25
    return max(16, math.ceil(8.0 * sigma))


def _windowed_operator(params: CircuitParams, half_width: int) -> TridiagonalHamiltonian:
    window = ChargeWindow.centered(params.n_half, params.n_g, half_width)
    return build_windowed(params, window)


def _solve_windowed(params, policy, compute, abs_floor=0.0):
    """Run ``compute(h)`` under the window policy; adaptive mode doubles W.

    Convergence between consecutive widths W and 2W requires
    |f(2W) - f(W)| <= rtol * max(|f|) + abs_floor.  A window that swallows
    the whole basis is exact, so it short-circuits the doubling.
    """
    if policy.mode == "full":
        return compute(build(params))
    if policy.mode == "fixed":
        return compute(_windowed_operator(params, policy.half_width))

    w = policy.w_initial if policy.w_initial is not None else initial_half_width(params)
    previous = None
    while True:
        h = _windowed_operator(params, w)
        value = compute(h)
        if h.is_full_window:
            return value
        if previous is not None:
            scale = float(np.max(np.abs([value, previous])))
            change = float(np.max(np.abs(np.asarray(value) - np.asarray(previous))))
            if change <= policy.rtol * scale + abs_floor:
                return value
        if w >= policy.w_max:
            raise WindowConvergenceError(
                f"window not converged at half-width cap {policy.w_max}",
                achieved=w,
            )
        previous = value
        w = min(2 * w, max(policy.w_max, 1))


def qubit_frequency(
    params: CircuitParams, policy: WindowPolicy = DEFAULT_POLICY, tol: float | None = None
) -> float:
    """First spectral gap E_1 - E_0 under the window policy."""

    def gap(h: TridiagonalHamiltonian) -> float:
        if h.dim < 2:
            raise ValueError("qubit frequency needs at least two charge states")
        spectrum = lowest_eigenvalues(h, 2, tol)
        return spectrum.pairs[1].value - spectrum.pairs[0].value

    return _solve_windowed(params, policy, gap)


def expected_imbalance(params: CircuitParams, policy: WindowPolicy = DEFAULT_POLICY) -> float:
    """Ground-state charge imbalance <n> = sum_n n |psi_0(n)|^2."""

    def imbalance(h: TridiagonalHamiltonian) -> float:
        pair = ground_state(h)
        v = pair.vector
        return float(np.dot(h.charges(), v * v))

    floor = 1e-12 * max(1.0, abs(params.n_g))
    return _solve_windowed(params, policy, imbalance, abs_floor=floor)


@dataclass(frozen=True)
class SusceptibilityResult:
    """Charge susceptibility with its finite-difference bookkeeping.

    ``value`` is the plain central difference of <n> at the requested step;
    ``richardson`` refines it with one extrapolation level and
    ``error_estimate`` is their disagreement.  The two slope fields give the
    independent routes to dE_0/dn_g used by the Hellmann-Feynman check:
    a central difference of E_0 itself versus -2 E_C (<n> - n_g).
    """

    value: float
    step: float
    richardson: float
    error_estimate: float
    e0_slope_fd: float
    e0_slope_hf: float

    def __float__(self) -> float:
        return self.value


def charge_susceptibility(
    params: CircuitParams,
    policy: WindowPolicy = DEFAULT_POLICY,
    step: float | None = None,
) -> SusceptibilityResult:
    """d<n>/dn_g by central difference, with a Hellmann-Feynman cross-check."""
    if step is None:
        step = 1e-4 * max(1.0, abs(params.n_g))
    if not step > 0:
        raise ValueError("step must be positive")

    def imbalance_at(ng: float) -> float:
        return expected_imbalance(params.with_ng(ng), policy)

    def e0_at(ng: float) -> float:
        def e0(h):
            return lowest_eigenvalues(h, 1).pairs[0].value

        return _solve_windowed(params.with_ng(ng), policy, e0)

    ng = params.n_g
    d_h = (imbalance_at(ng + step) - imbalance_at(ng - step)) / (2.0 * step)
    d_h2 = (imbalance_at(ng + 0.5 * step) - imbalance_at(ng - 0.5 * step)) / step
    richardson = (4.0 * d_h2 - d_h) / 3.0
    e0_slope_fd = (e0_at(ng + step) - e0_at(ng - step)) / (2.0 * step)
    e0_slope_hf = -2.0 * params.e_c * (imbalance_at(ng) - ng)
    return SusceptibilityResult(
        value=d_h,
        step=step,
        richardson=richardson,
        error_estimate=abs(richardson - d_h2),
        e0_slope_fd=e0_slope_fd,
        e0_slope_hf=e0_slope_hf,
    )


@dataclass(frozen=True)
class CurvatureResult:
    """Second derivative at n_g = 0 with its closed-form reference."""

    value: float
    reference: float
    step: float
    refined: float
    unstable: bool

    @property
    def ratio(self) -> float:
        return self.value / self.reference

    def __float__(self) -> float:
        return self.value


def _five_point_curvature(f, h: float) -> float:
    return (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (
        12.0 * h * h
    )


def _curvature_with_check(f, step: float, label: str) -> tuple[float, float, bool]:
    value = _five_point_curvature(f, step)
    half = _five_point_curvature(f, 0.5 * step)
    refined = (16.0 * half - value) / 15.0
    # The step-halved extrapolation estimates the returned stencil's error.
    denom = max(abs(refined), 1e-300)
    unstable = abs(refined - value) > 0.10 * denom
    if unstable:
        warnings.warn(
            f"{label} curvature: step-halving check disagrees by more than 10%",
            StepInstabilityWarning,
            stacklevel=3,
        )
    return value, refined, unstable


def dispersion_curvature(
    params: CircuitParams, policy: WindowPolicy = DEFAULT_POLICY, step: float = 0.125
) -> CurvatureResult:
    """d^2(qubit frequency)/dn_g^2 at zero offset charge.

    Referenced against the large-island transmon value
    -sqrt(2 E_C E_J) / (2 N^2); band extrema are unit-spaced in n_g, so the
    default step 1/8 stays well inside one period.
    """
    if params.e_j / params.e_c < 10.0:
        warnings.warn(
            "dispersion curvature is a transmon-regime diagnostic; "
            f"E_J/E_C = {params.e_j / params.e_c:.3g} is outside it",
            RegimeWarning,
            stacklevel=2,
        )

    def f(ng: float) -> float:
        return qubit_frequency(params.with_ng(ng), policy)

    value, refined, unstable = _curvature_with_check(f, step, "dispersion")
    reference = -math.sqrt(2.0 * params.e_c * params.e_j) / (2.0 * params.n_half**2)
    return CurvatureResult(
        value=value, reference=reference, step=step, refined=refined, unstable=unstable
    )


def susceptibility_curvature(
    params: CircuitParams, policy: WindowPolicy = DEFAULT_POLICY, step: float = 0.125
) -> CurvatureResult:
    """d^2(d<n>/dn_g)/dn_g^2 at zero offset charge vs -3 E_J / (2 E_C N^4)."""
    if params.e_j / params.e_c < 10.0:
        warnings.warn(
            "susceptibility curvature is a transmon-regime diagnostic; "
            f"E_J/E_C = {params.e_j / params.e_c:.3g} is outside it",
            RegimeWarning,
            stacklevel=2,
        )

    def f(ng: float) -> float:
        return charge_susceptibility(params.with_ng(ng), policy).value

    value, refined, unstable = _curvature_with_check(f, step, "susceptibility")
    reference = -3.0 * params.e_j / (2.0 * params.e_c * params.n_half**4)
    return CurvatureResult(
        value=value, reference=reference, step=step, refined=refined, unstable=unstable
    )


@dataclass
class SweepTable:
    """Columnar observable-vs-n_g results with full parameter provenance."""

    grid: np.ndarray
    columns: dict[str, np.ndarray]
    meta: dict

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        if self.grid.size and np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        for name, col in self.columns.items():
            col = np.asarray(col, dtype=float)
            if col.shape != self.grid.shape:
                raise ValueError(f"column {name!r} length does not match grid")
            self.columns[name] = col

    @property
    def grid_label(self) -> str:
        return self.meta.get("grid_label", "n_g")

    def to_csv(self, destination) -> None:
        """RFC-4180 rows preceded by '#'-prefixed meta lines, 17 significant digits."""
        names = list(self.columns)
        lines = [f"# meta {json.dumps(self.meta, sort_keys=True)}"]
        lines.append(",".join([self.grid_label] + names))
        for i in range(self.grid.size):
            row = [format(self.grid[i], ".17g")]
            row += [format(self.columns[name][i], ".17g") for name in names]
            lines.append(",".join(row))
        text = "\r\n".join(lines) + "\r\n"
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            with open(destination, "w", newline="") as fh:
                fh.write(text)

    def to_json(self, destination) -> None:
        payload = {
            "meta": self.meta,
            "grid": [float(x) for x in self.grid],
            "columns": {name: [float(x) for x in col] for name, col in self.columns.items()},
        }
        text = json.dumps(payload, sort_keys=True)
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            with open(destination, "w") as fh:
                fh.write(text)

    @classmethod
    def read_csv(cls, source) -> "SweepTable":
        if hasattr(source, "read"):
            text = source.read()
        else:
            with open(source, "r", newline="") as fh:
                text = fh.read()
        meta = {}
        header: list[str] | None = None
        grid = []
        data: list[list[float]] = []
        for line in text.splitlines():
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("meta "):
                    meta = json.loads(body[5:])
                continue
            cells = line.split(",")
            if header is None:
                header = cells
                continue
            grid.append(float(cells[0]))
            data.append([float(c) for c in cells[1:]])
        if header is None:
            raise ValueError("no header row found")
        columns = {
            name: np.array([row[j] for row in data])
            for j, name in enumerate(header[1:])
        }
        return cls(grid=np.array(grid), columns=columns, meta=meta)

    @classmethod
    def read_json(cls, source) -> "SweepTable":
        if hasattr(source, "read"):
            payload = json.load(source)
        else:
            with open(source) as fh:
                payload = json.load(fh)
        return cls(
            grid=np.array(payload["grid"], dtype=float),
            columns={k: np.array(v, dtype=float) for k, v in payload["columns"].items()},
            meta=payload["meta"],
        )


def band_sweep(
    params: CircuitParams,
    grid,
    levels: int = 3,
    policy: WindowPolicy = DEFAULT_POLICY,
    include_imbalance: bool = False,
    include_susceptibility: bool = False,
    subtract_ground: bool = False,
) -> SweepTable:
    """Tabulate the lowest bands (and optionally <n>, d<n>/dn_g) over a grid.

    ``params.n_g`` is ignored; the grid supplies the offset charge.  Points
    whose window fails to converge are flagged in the ``converged`` column
    and carry NaNs rather than being dropped.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    if levels < 1:
        raise ValueError("levels must be at least 1")
    if levels > params.dim:
        raise ValueError(f"levels {levels} exceeds basis size {params.dim}")

    names = [f"E{j}" for j in range(levels)]
    if include_imbalance:
        names.append("n_expect")
    if include_susceptibility:
        names.append("chi")
    columns = {name: np.full(grid.size, np.nan) for name in names}
    flags = np.ones(grid.size)

    def bands(h: TridiagonalHamiltonian) -> np.ndarray:
        return lowest_eigenvalues(h, levels).values

    for i, ng in enumerate(grid):
        point = params.with_ng(float(ng))
        try:
            values = _solve_windowed(point, policy, bands, abs_floor=0.0)
            if subtract_ground:
                values = values - values[0]
            for j in range(levels):
                columns[f"E{j}"][i] = values[j]
            if include_imbalance:
                columns["n_expect"][i] = expected_imbalance(point, policy)
            if include_susceptibility:
                columns["chi"][i] = charge_susceptibility(point, policy).value
        except WindowConvergenceError:
            flags[i] = 0.0
    columns["converged"] = flags

    meta = {
        "e_j": params.e_j,
        "e_c": params.e_c,
        "pairs_total": params.pairs_total,
        "levels": levels,
        "window_mode": policy.mode,
        "window_rtol": policy.rtol,
        "window_half_width": policy.half_width,
        "window_w_initial": policy.w_initial,
        "window_w_max": policy.w_max,
        "subtract_ground": subtract_ground,
    }
    return SweepTable(grid=grid, columns=columns, meta=meta)
