"""The experiment grid: protocols x node counts x spacings, plus mobile cells.

Every cell gets its own seed, ``derive_seed(base_seed, protocol, n, D, mobility)``,
so results do not depend on which other cells run or on the worker count.
"""
from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .engine import derive_seed
from .reports import comparison_csv, extractability_tsv, write_run
from .scenario import MOBILITY_DEFAULTS, NODE_COUNTS, SPACINGS, Mobility, ScenarioConfig, run_scenario
from .video import PsnrCache, PsnrConfig, generate_trace, load_yuv

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridAxes:
    protocols: tuple[str, ...] = ("AODV", "DSDV")
    node_counts: tuple[int, ...] = NODE_COUNTS
    spacings: tuple[float, ...] = SPACINGS
    mobility: tuple[str, ...] = ("OUTWARD", "INWARD")  # mobile cells, one per protocol each
    mobility_nodes: int = 25


@dataclass(frozen=True)
class Cell:
    protocol: str
    n_nodes: int
    spacing: float
    mobility: str = "STATIC"

    @property
    def static(self) -> bool:
        return self.mobility == "STATIC"

    @property
    def name(self) -> str:
        if self.static:
            return f"{self.protocol}_N{self.n_nodes}_D{self.spacing:g}"
        return f"{self.protocol}_N{self.n_nodes}_{self.mobility}"

    def seed(self, base_seed: int) -> int:
        return derive_seed(base_seed, self.protocol, self.n_nodes, f"{self.spacing:g}", self.mobility)


def grid_cells(axes: GridAxes = GridAxes()) -> list[Cell]:
    cells = [Cell(p.upper(), n, float(d)) for p in axes.protocols
             for n in axes.node_counts for d in axes.spacings]
    for p in axes.protocols:
        for mob in axes.mobility:
            start, _ = MOBILITY_DEFAULTS[Mobility(mob.upper())]
            cells.append(Cell(p.upper(), axes.mobility_nodes, start, mob.upper()))
    return cells


def cell_config(base: ScenarioConfig, cell: Cell, base_seed: int) -> ScenarioConfig:
    return dataclasses.replace(base, protocol=cell.protocol, n_nodes=cell.n_nodes,
                               spacing=cell.spacing, mobility=cell.mobility,
                               seed=cell.seed(base_seed))


# -- execution --------------------------------------------------------------

_WORKER: dict = {}


def _init_worker(yuv_path, width, height, bits, base: ScenarioConfig) -> None:
    seq = load_yuv(yuv_path, width, height, bits).head(base.n_frames)
    _WORKER.update(
        seq=seq,
        trace=generate_trace(seq, base.fps, base.gop_len, base.mtu, base.size_model),
        cache=PsnrCache(seq, PsnrConfig(bits=bits)),
    )


def _run_cell(cfg: ScenarioConfig, out_dir: str, window: int):
    try:
        result = run_scenario(cfg, _WORKER["seq"], _WORKER["trace"], _WORKER["cache"])
        write_run(result, out_dir, window)
        return result.summary(), None
    except Exception as exc:  # recorded per cell, the grid carries on
        return None, f"{type(exc).__name__}: {exc}"


@dataclass
class GridOutcome:
    summaries: dict[Cell, dict]
    failures: dict[Cell, str]

    @property
    def ok(self) -> bool:
        return not self.failures


def run_grid(base: ScenarioConfig, yuv_path, out_dir, *, axes: GridAxes = GridAxes(),
             base_seed: int | None = None, jobs: int = 1, window: int = 100,
             width: int = 352, height: int = 288, bits: int = 8) -> GridOutcome:
    """Run every cell, write per-cell directories and the grid-level reports."""
    out = Path(out_dir)
    (out / "cells").mkdir(parents=True, exist_ok=True)
    base_seed = base.seed if base_seed is None else base_seed
    cells = grid_cells(axes)
    work = []
    summaries: dict[Cell, dict] = {}
    failures: dict[Cell, str] = {}
    for cell in cells:
        try:
            cfg = cell_config(base, cell, base_seed).validate()
        except Exception as exc:
            failures[cell] = f"{type(exc).__name__}: {exc}"
            continue
        work.append((cell, cfg, str(out / "cells" / cell.name)))

    init_args = (str(yuv_path), width, height, bits, base)
    if jobs <= 1:
        _init_worker(*init_args)
        results = (_run_cell(cfg, d, window) for _, cfg, d in work)
        results = list(_progress(work, results))
    else:
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=init_args) as pool:
            futures = [pool.submit(_run_cell, cfg, d, window) for _, cfg, d in work]
            results = list(_progress(work, (f.result() for f in futures)))
    for (cell, _, _), (summary, err) in zip(work, results):
        if err is None:
            summaries[cell] = summary
        else:
            failures[cell] = err

    static = {(c.protocol, c.n_nodes, c.spacing): summaries.get(c)
              for c in cells if c.static}
    (out / "extractability.tsv").write_text(
        extractability_tsv(static, axes.node_counts, [float(d) for d in axes.spacings]))
    (out / "comparison.csv").write_text(
        comparison_csv([summaries[c] for c in cells if c in summaries],
                       tuple(p.upper() for p in axes.protocols)))
    lines = ["cell\terror"] + [f"{c.name}\t{failures[c]}" for c in cells if c in failures]
    (out / "failures.tsv").write_text("\n".join(lines) + "\n")
    return GridOutcome(summaries, failures)


def _progress(work, results):
    for (cell, _, _), res in zip(work, results):
        if res[1] is None:
            log.info("%s: decodable %.3f", cell.name, res[0]["decodable_rate"])
        else:
            log.warning("%s failed: %s", cell.name, res[1])
        yield res
