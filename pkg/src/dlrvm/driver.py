"""Simulation driver: scenario -> Strang steps -> diagnostics and output files."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import diagnostics
from .config import EPS_SYMBOL, RunConfig, format_config, resolve
from .diagnostics import DiagnosticsRecord
from .grid import GridSpec
from .integrator import NumericalInstability, SubstepConfig, strang_step
from .lowrank import LowRankState
from .maxwell import EMField, bootstrap_half_step_B
from .oracle import FullTensorState, oracle_strang_step
from .scenarios import ScenarioSpec, build

log = logging.getLogger(__name__)

TIMESERIES_COLUMNS = [
    "time",
    "mass",
    "energy_e",
    "energy_m",
    "energy_k",
    "energy_total",
    "err_mass_rel",
    "err_energy_rel",
    "gauss_l2",
    "sigma_min",
    "mode1_E1",
    "mode1_E2",
    "mode1_B3",
]


@dataclass
class RunResult:
    config: RunConfig
    records: list[DiagnosticsRecord] = field(default_factory=list)
    state: LowRankState | FullTensorState | None = None
    field: EMField | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])


def grid_of(cfg: RunConfig) -> GridSpec:
    d = cfg.domains
    return GridSpec(
        cfg.n_x,
        cfg.n_v1,
        cfg.n_v2,
        (d["x_min"], d["x_max"]),
        (d["v1_min"], d["v1_max"]),
        (d["v2_min"], d["v2_max"]),
    )


def resolve_eps(cfg: RunConfig, grid: GridSpec) -> float:
    if cfg.eps_dissipation == EPS_SYMBOL:
        return 1e-2 * grid.h_x**2
    return float(cfg.eps_dissipation)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def timeseries_rows(records: list[DiagnosticsRecord]):
    r0 = records[0]
    for r in records:
        em, ee = diagnostics.relative_errors(r, r0)
        yield [
            r.time,
            r.mass,
            r.electric_energy,
            r.magnetic_energy,
            r.kinetic_energy,
            r.total_energy,
            em,
            ee,
            r.gauss_l2,
            r.sigma_min,
            r.mode1_E1,
            r.mode1_E2,
            r.mode1_B3,
        ]


def write_timeseries(path: Path, records: list[DiagnosticsRecord]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(TIMESERIES_COLUMNS) + "\n")
        if records:
            for row in timeseries_rows(records):
                fh.write(",".join(_fmt(v) for v in row) + "\n")


def v2_zero_slice(state, grid: GridSpec):
    """``f(x, v1, v2 ~ 0)`` as an ``n_x x n_v1`` matrix, plus the v2 value used."""
    i0 = int(np.argmin(np.abs(grid.v2)))
    if isinstance(state, FullTensorState):
        return state.f[:, :, i0], grid.v2[i0]
    K = state.S.T @ state.X
    return K.T @ state.V[:, :, i0], grid.v2[i0]


def write_snapshot(directory: Path, time: float, state, grid: GridSpec) -> Path:
    data, v2 = v2_zero_slice(state, grid)
    path = directory / f"snapshot_t{time:.6g}.csv"
    header = (
        f"# time={_fmt(time)} rows=x n_x={grid.n_x} x_min={_fmt(grid.x_axis.a)} x_max={_fmt(grid.x_axis.b)} "
        f"cols=v1 n_v1={grid.n_v1} v1_min={_fmt(grid.v1_axis.a)} v1_max={_fmt(grid.v1_axis.b)} v2={_fmt(v2)}"
    )
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in data:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def simulate(cfg: RunConfig, out_dir: str | Path | None = None, oracle: bool = False, progress: bool = True) -> RunResult:
    """Run a configuration; write files when ``out_dir`` is given.

    Numerical aborts do not raise: the partial result carries ``error`` and,
    with an output directory, a ``FAILED`` marker next to the partial files.
    """
    cfg = resolve(cfg)
    grid = grid_of(cfg)
    eps = resolve_eps(cfg, grid)
    sub = SubstepConfig(cfg.n_substeps, cfg.rk_scheme)
    tau = cfg.tau
    n_steps = cfg.n_steps

    spec = ScenarioSpec(cfg.scenario, cfg.rank, grid=grid, params=cfg.params, seed=cfg.seed, pad=cfg.pad)
    state, fld0 = build(spec)
    fld0.eps = eps
    if oracle:
        state = FullTensorState.from_lowrank(state)

    out = None
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "run_meta").write_text(format_config(cfg))
        failed = out / "FAILED"
        if failed.exists():
            failed.unlink()

    def measure(t, st, fl, B3):
        if oracle:
            return diagnostics.record_full(t, st.f, grid, fl, B3)
        return diagnostics.record(t, st, fl, B3)

    snapshot_steps = {}
    for ts in cfg.snapshot_times:
        snapshot_steps.setdefault(int(round(ts / tau)), ts)

    result = RunResult(cfg)
    result.records.append(measure(0.0, state, fld0, fld0.B3))
    if out is not None and 0 in snapshot_steps:
        write_snapshot(out, 0.0, state, grid)

    fld = EMField(fld0.E1, fld0.E2, bootstrap_half_step_B(grid, fld0.B3, fld0.E2, tau), eps)
    step = 0
    try:
        for step in range(1, n_steps + 1):
            B_prev = fld.B3
            if oracle:
                state, fld = oracle_strang_step(state, fld, tau, sub, cfg.correction)
            else:
                state, fld = strang_step(state, fld, tau, sub, cfg.correction)
            t = step * tau
            if step % cfg.cadence == 0:
                rec = measure(t, state, fld, 0.5 * (B_prev + fld.B3))
                if not all(np.isfinite(rec.values())):
                    raise NumericalInstability("non-finite diagnostics")
                result.records.append(rec)
                if progress:
                    log.info(
                        "step %d/%d t=%.4g mass=%.12g energy=%.12g gauss=%.3e",
                        step, n_steps, t, rec.mass, rec.total_energy, rec.gauss_l2,
                    )
            if out is not None and step in snapshot_steps:
                write_snapshot(out, t, state, grid)
    except NumericalInstability as exc:
        exc.step = step
        result.error = f"numerical abort at step {step} (t={step * tau:.6g}): {exc}"
        log.error(result.error)

    result.state = state
    result.field = fld
    if out is not None:
        write_timeseries(out / "timeseries.csv", result.records)
        if result.error:
            (out / "FAILED").write_text(result.error + "\n")
    return result
