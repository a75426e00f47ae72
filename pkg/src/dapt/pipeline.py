"""End-to-end orchestration: build once, evaluate at any sweep velocity.

A Workspace bundles everything that is independent of the sweep velocity
(spectral path, couplings, holonomies, phase integrals, correction blocks),
so a velocity sweep re-uses one spectral/coupling computation and only the
cheap assembly step runs per point.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .couplings import couplings_from_path
from .engine import (DynamicalPhase, StateFamily, ValidityReport,
                     advance_order, assemble_state, ground_amplitudes,
                     series_state, validity_margins, zero_order_blocks)
from .errors import ConfigError, InsufficientSweep
from .grid import Grid
from .holonomy import CorrectedHolonomy, corrected_holonomy, transport_all
from .propagate import propagate, residual
from .spectral import smooth_gauge, snapshot_eigensystem


@dataclass(frozen=True)
class Workspace:
    """Velocity-independent artifacts of one protocol."""

    grid: Grid
    path: object               # SpectralPath
    couplings: object          # CouplingSet
    holonomies: list
    phases: DynamicalPhase
    blocks: list               # CorrectionBlocks, orders 0..order
    order: int
    model: object = None
    samples: np.ndarray = None

    @classmethod
    def build(cls, model=None, samples=None, grid: Grid = None,
              order: int = 1, degeneracy_tol: float = 1e-8,
              gap_floor: float = None,
              model_holonomy: bool = True) -> "Workspace":
        """Assemble every velocity-independent artifact.

        ``model_holonomy=True`` takes the holonomies from the model's
        closed form when it has one, removing the transport discretization
        error from everything downstream; pass False to force the numeric
        transport (useful when the transport itself is under test).
        """
        if grid is None:
            raise ConfigError("a grid is required")
        if order < 0:
            raise ConfigError("order must be >= 0")
        if (model is None) == (samples is None):
            raise ConfigError("exactly one of model/samples must be given")
        if model is not None:
            path = model.spectral_path(grid)
            cs = model.couplings(grid)
        else:
            path = smooth_gauge(snapshot_eigensystem(
                samples, grid, degeneracy_tol=degeneracy_tol))
            cs = couplings_from_path(path, h=samples, gap_floor=gap_floor)
        if model_holonomy and model is not None and hasattr(model, "holonomies"):
            holonomies = model.holonomies(grid)
        else:
            holonomies = transport_all(cs)
        phases = DynamicalPhase.from_path(path)
        blocks = [zero_order_blocks(cs, holonomies,
                                    ground_amplitudes(path.n_levels))]
        for _ in range(order):
            blocks.append(advance_order(blocks[-1], cs))
        return cls(grid=grid, path=path, couplings=cs, holonomies=holonomies,
                   phases=phases, blocks=blocks, order=order, model=model,
                   samples=samples)

    def series(self, velocity: float, order: int = None) -> StateFamily:
        """Partial sum up to ``order`` (default: everything built)."""
        if order is None:
            order = self.order
        if order > self.order:
            raise ConfigError(f"order {order} exceeds built order {self.order}")
        return series_state(self.blocks, self.phases, velocity, order=order)

    def term(self, p: int, velocity: float) -> StateFamily:
        """Single order-p family (without the v^p weight)."""
        return assemble_state(self.blocks[p], self.phases, velocity)

    def margins(self, velocity: float, threshold: float = 0.1) -> ValidityReport:
        return validity_margins(self.couplings, self.holonomies, self.phases,
                                velocity, threshold=threshold)

    def corrected(self, velocity: float) -> CorrectedHolonomy:
        if self.order < 1:
            raise ConfigError("corrected holonomy needs order >= 1")
        psi0 = self.term(0, velocity)
        psi1 = self.term(1, velocity)
        return corrected_holonomy(psi0, psi1, self.phases, self.holonomies[0],
                                  velocity)

    def start_vector(self, label: int = 0) -> np.ndarray:
        """Ground-frame column ``label`` at s = 0."""
        return self.path.blocks[0][0][:, label].copy()

    def exact(self, velocity: float, label: int = 0, substeps: int = None,
              max_phase: float = 0.005, max_steps: int = 2_000_000):
        """Reference evolution of the label-``label`` ground start.

        Uses the model's closed form when one exists, otherwise the RK4
        integrator on the stored samples (phase cap tightened well below
        the propagate default, since this serves as the accuracy yardstick
        for everything else). Returns (psi, norm_drift).
        """
        if self.model is not None and hasattr(self.model, "exact_state") \
                and label == 0:
            return self.model.exact_state(self.grid.s, velocity), 0.0
        h = self.model.hamiltonian if self.model is not None else self.samples
        res = propagate(h, self.grid, self.start_vector(label), velocity,
                        substeps=substeps, max_phase=max_phase,
                        max_steps=max_steps)
        return res.psi, res.norm_drift

    def series_residuals(self, velocity: float, label: int = 0,
                         exact=None) -> list:
        """Sup-norm mismatch of each partial sum against the reference."""
        if exact is None:
            exact, _ = self.exact(velocity, label=label)
        out = []
        for p in range(self.order + 1):
            fam = self.series(velocity, order=p)
            psi = fam.vectors(self.path)[:, label, :]
            out.append(residual(psi, exact))
        return out


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    half_width: float          # 2 * standard error of the slope
    n_points: int


def fit_power_law(x, y) -> PowerLawFit:
    """Least-squares slope of log10 y against log10 x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InsufficientSweep("need matching 1-d arrays")
    if len(x) < 4:
        raise InsufficientSweep(f"need at least 4 points, got {len(x)}")
    if len(np.unique(x)) != len(x):
        raise InsufficientSweep("duplicate sweep values")
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise InsufficientSweep("power-law fit needs positive data")
    if x.max() / x.min() < 10.0:
        raise InsufficientSweep("sweep must span at least one decade")
    lx, ly = np.log10(x), np.log10(y)
    coeff, res_info = np.polyfit(lx, ly, 1, full=True)[:2]
    slope, intercept = float(coeff[0]), float(coeff[1])
    n = len(x)
    if n > 2 and res_info.size:
        var = float(res_info[0]) / (n - 2)
        half = 2.0 * math.sqrt(var / float(np.sum((lx - lx.mean()) ** 2)))
    else:
        half = 0.0
    return PowerLawFit(slope=slope, intercept=intercept, half_width=half,
                       n_points=n)


@dataclass(frozen=True)
class SweepRow:
    velocity: float
    residuals: tuple           # per order 0..P
    margin_secular: float
    margin_gap: float
    holonomy_defect: float     # sup_s || V^dag V - I ||


@dataclass(frozen=True)
class SweepResult:
    rows: list
    fits: list                 # PowerLawFit per order 0..P

    def column(self, p: int) -> np.ndarray:
        return np.array([r.residuals[p] for r in self.rows])

    @property
    def velocities(self) -> np.ndarray:
        return np.array([r.velocity for r in self.rows])


def _sweep_point(ws: Workspace, velocity: float, threshold: float) -> SweepRow:
    res = ws.series_residuals(velocity)
    rep = ws.margins(velocity, threshold=threshold)
    gap_sup = max(rep.sup_gap.values()) if rep.sup_gap else 0.0
    if ws.order >= 1:
        defect = ws.corrected(velocity).unitarity_deviation()
    else:
        defect = float("nan")
    return SweepRow(velocity=velocity, residuals=tuple(res),
                    margin_secular=rep.sup_secular, margin_gap=gap_sup,
                    holonomy_defect=defect)


def sweep(ws: Workspace, velocities, threshold: float = 0.1,
          max_workers: int = None) -> SweepResult:
    """Evaluate every sweep velocity in a worker pool and fit the slopes."""
    vs = [float(v) for v in velocities]
    if len(vs) < 4:
        raise InsufficientSweep(f"need at least 4 velocities, got {len(vs)}")
    if len(set(vs)) != len(vs):
        raise InsufficientSweep("duplicate sweep velocities")
    if min(vs) <= 0.0:
        raise InsufficientSweep("velocities must be positive")
    if max(vs) / min(vs) < 10.0:
        raise InsufficientSweep("sweep must span at least one decade")
    vs = sorted(vs)
    if max_workers is None:
        max_workers = min(8, len(vs))
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        rows = list(pool.map(lambda v: _sweep_point(ws, v, threshold), vs))
    fits = []
    v_arr = np.array(vs)
    for p in range(ws.order + 1):
        r_arr = np.array([row.residuals[p] for row in rows])
        fits.append(fit_power_law(v_arr, r_arr))
    return SweepResult(rows=rows, fits=fits)
