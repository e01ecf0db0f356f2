"""Experiment orchestration: neutral degrees, plateau batteries, solver sweeps.

Every random task draws its seed from :func:`gcp_neutrality.utils.task_seed`
with key ``(stream, instance, ..., index)``, so results do not depend on
the number of workers or on completion order.

Files written by :func:`emit_reports` (all UTF-8, ``\\n`` line endings):

``table1.csv``
    instance, V, chi, nbh, nd_random, ratio_random, nd_lo, ratio_lo
``degrees_samples.csv``
    instance, kind (random|local_optimum), sample, fitness, neutral_degree, ratio
``table2.csv``
    instance, rho1, walks_defined
``table3.csv``
    instance, T1, T2, T3
``table4.csv``
    instance, T3, nbS_min, nbS_med, nbS_mean, nbS_max, L_min, L_med, L_mean, L_max, revisits
``descents.jsonl`` / ``walks.jsonl``
    one record per descent / walk, full precision
``solve_long.csv``
    instance, config, mns, run, fitness, evaluations
``solve_summary.csv``
    instance, config, mns, runs, min, median, mean, max, legal_runs, median_minus_ils, p_less_than_ils
``runs.jsonl``
    one record per solver run with the best colouring and a trajectory of
    at most 1000 ``[evaluations, best_fitness]`` points
``notices.txt``
    instances whose walk analysis was skipped, and why
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy import stats

from .coloring import build_state
from .graph import Graph, InstanceMeta, load_manifest, manifest_lookup, normalize_name, read_dimacs
from .landscape import BatteryReport, DescentReport, autocorrelation, descent_batch, random_solution, walk_batch
from .neighborhood import classify
from .search import NilsConfig, RunRecord, nils
from .utils import StatSummary, percent, sig3, task_rng, task_seed

__all__ = [
    "ConfigError",
    "InstanceError",
    "ExperimentConfig",
    "StatSummary",
    "Instance",
    "DegreesResult",
    "PlateauResult",
    "SolveResult",
    "load_instances",
    "run_degrees",
    "run_plateaus",
    "run_solve",
    "emit_reports",
    "DEFAULT_INSTANCES",
]

log = logging.getLogger(__name__)

MODES = ("degrees", "plateaus", "solve", "full")
DEFAULT_INSTANCES = ("dsjc250.5", "r250.5", "flat300_28_0", "le450_25c")
WALK_MAX_NBH = 16_000
WALK_MIN_LO_RATIO = 0.01


class ConfigError(ValueError):
    pass


class InstanceError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    instances: list[Path]
    mode: str = "full"
    k: int | None = None
    samples: int = 30
    mns: list[float] = field(default_factory=lambda: [0.0, 1.0, 2.0, 5.0])
    eval_budget: int = 20_000_000
    seed: int = 0
    out: Path = Path("results")
    jobs: int = 1
    kick_fraction: float = 1.0
    force: bool = False
    manifest: Path | None = None

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.instances:
            raise ConfigError("no instance given")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.eval_budget <= 0:
            raise ConfigError("budget must be positive")
        if self.k is not None and self.k < 2:
            raise ConfigError("k must be >= 2")
        if not self.mns or any(c < 0 for c in self.mns):
            raise ConfigError("mns coefficients must be a non-empty list of non-negative numbers")
        if not 0 < self.kick_fraction <= 1:
            raise ConfigError("kick fraction must lie in (0, 1]")
        if self.jobs == 0:
            raise ConfigError("jobs must be non-zero")


@dataclass(frozen=True)
class Instance:
    name: str
    graph: Graph
    k: int
    meta: InstanceMeta | None

    @property
    def nbh_size(self) -> int:
        return self.graph.n * (self.k - 1)


def load_instances(config: ExperimentConfig) -> list[Instance]:
    """Parse every instance file and resolve its ``k`` (override, else manifest chi)."""
    config.validate()
    manifest = load_manifest(config.manifest)
    out = []
    for path in config.instances:
        path = Path(path)
        if not path.is_file():
            raise InstanceError(f"instance file not found: {path}")
        graph = read_dimacs(path)
        meta = manifest_lookup(graph.name, manifest)
        if meta is not None and meta.n != graph.n:
            raise InstanceError(f"{path}: n={graph.n} but the manifest lists n={meta.n} for {meta.name}")
        k = config.k if config.k is not None else (meta.chi if meta else None)
        if k is None:
            raise ConfigError(f"{graph.name}: not in the manifest, pass --k")
        out.append(Instance(meta.name if meta else graph.name, graph, k, meta))
    return out


# --- neutral degrees -------------------------------------------------------


@dataclass
class DegreesResult:
    instance: Instance
    random_fitness: list[int]
    random_nd: list[int]
    descents: list[DescentReport]

    @property
    def nd_random(self) -> float:
        return float(np.mean(self.random_nd))

    @property
    def nd_lo(self) -> float:
        return float(np.mean([d.neutral_degree for d in self.descents]))

    @property
    def ratio_random(self) -> float:
        return self.nd_random / self.instance.nbh_size

    @property
    def ratio_lo(self) -> float:
        return self.nd_lo / self.instance.nbh_size

    def row(self) -> list:
        inst = self.instance
        return [
            inst.name,
            inst.graph.n,
            inst.k,
            inst.nbh_size,
            sig3(self.nd_random),
            percent(self.ratio_random),
            sig3(self.nd_lo),
            percent(self.ratio_lo),
        ]


def _random_nd(g: Graph, k: int, seed: int, name: str, index: int) -> tuple[int, int]:
    state = build_state(g, random_solution(g, k, task_rng(seed, "random", name, index)), k)
    return state.conflicts, classify(state).neutral


def _instance_degrees(inst: Instance, config: ExperimentConfig) -> DegreesResult:
    name = normalize_name(inst.name)
    pairs = Parallel(n_jobs=config.jobs)(
        delayed(_random_nd)(inst.graph, inst.k, config.seed, name, i) for i in range(config.samples)
    )
    descents = descent_batch(inst.graph, inst.k, config.samples, task_seed(config.seed, "lo", name), config.jobs)
    return DegreesResult(inst, [p[0] for p in pairs], [p[1] for p in pairs], descents)


def run_degrees(config: ExperimentConfig, instances: Sequence[Instance] | None = None) -> list[DegreesResult]:
    """Mean neutral degree of uniform random solutions and of local optima."""
    instances = load_instances(config) if instances is None else instances
    return [_instance_degrees(inst, config) for inst in instances]


# --- plateaus ----------------------------------------------------------------


@dataclass
class PlateauResult:
    instance: Instance
    battery: BatteryReport
    skipped: str | None = None

    @property
    def analysed(self) -> bool:
        return self.skipped is None


def _instance_plateaus(
    inst: Instance, config: ExperimentConfig, descents: list[DescentReport] | None = None
) -> PlateauResult:
    name = normalize_name(inst.name)
    if descents is None:
        descents = descent_batch(
            inst.graph, inst.k, config.samples, task_seed(config.seed, "lo", name), config.jobs
        )
    length = max(d.step_length for d in descents)
    lo_ratio = float(np.mean([d.neutral_ratio for d in descents]))
    reason = None
    if inst.nbh_size > WALK_MAX_NBH:
        reason = f"neighbourhood size {inst.nbh_size} > {WALK_MAX_NBH}"
    elif lo_ratio < WALK_MIN_LO_RATIO:
        reason = f"local-optimum neutral ratio {percent(lo_ratio)} < {percent(WALK_MIN_LO_RATIO)}"
    if reason and not config.force:
        log.warning("skipping walk analysis of %s: %s (use --force to override)", inst.name, reason)
        return PlateauResult(inst, BatteryReport(inst.k, descents, [], length), skipped=reason)
    walks = walk_batch(
        inst.graph,
        inst.k,
        [d.optimum for d in descents],
        length,
        task_seed(config.seed, "walk", name),
        config.jobs,
    )
    return PlateauResult(inst, BatteryReport(inst.k, descents, walks, length))


def run_plateaus(
    config: ExperimentConfig,
    instances: Sequence[Instance] | None = None,
    degrees: Sequence[DegreesResult] | None = None,
) -> list[PlateauResult]:
    """Plateau battery per instance, reusing the local optima of ``degrees`` if given.

    Walks are skipped (with a notice) when the neighbourhood exceeds 16,000
    moves or the local optima average less than 1% neutral neighbours,
    unless ``config.force`` is set.
    """
    if degrees is not None:
        return [_instance_plateaus(d.instance, config, d.descents) for d in degrees]
    instances = load_instances(config) if instances is None else instances
    return [_instance_plateaus(inst, config) for inst in instances]


# --- solver sweep ------------------------------------------------------------


@dataclass
class SolveResult:
    instance: Instance
    runs: dict[float, list[RunRecord]]

    def fitnesses(self, coef: float) -> list[int]:
        return [r.best_fitness for r in self.runs[coef]]

    def median(self, coef: float) -> float:
        return float(np.median(self.fitnesses(coef)))


def _solve_task(g: Graph, k: int, config: NilsConfig) -> RunRecord:
    return nils(g, k, config)


def solver_config(config: ExperimentConfig, name: str, coef: float, run: int) -> NilsConfig:
    return NilsConfig(
        mns_coef=float(coef),
        kick_fraction=config.kick_fraction,
        eval_budget=int(config.eval_budget),
        seed=task_seed(config.seed, "solve", normalize_name(name), repr(float(coef)), run),
    )


def run_solve(config: ExperimentConfig, instances: Sequence[Instance] | None = None) -> list[SolveResult]:
    """``samples`` seeded solver runs for each MNS coefficient (0 is the plain ILS)."""
    instances = load_instances(config) if instances is None else instances
    results = []
    for inst in instances:
        tasks = [(coef, run) for coef in config.mns for run in range(config.samples)]
        records = Parallel(n_jobs=config.jobs)(
            delayed(_solve_task)(inst.graph, inst.k, solver_config(config, inst.name, coef, run))
            for coef, run in tasks
        )
        runs: dict[float, list[RunRecord]] = {float(c): [] for c in config.mns}
        for (coef, _), rec in zip(tasks, records):
            runs[float(coef)].append(rec)
        results.append(SolveResult(inst, runs))
    return results


# --- reports -----------------------------------------------------------------


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")


def _write_jsonl(path: Path, records: list[dict]) -> None:
    path.write_text("".join(json.dumps(r, sort_keys=True) + "\n" for r in records), encoding="utf-8")


def _mns_label(coef: float) -> str:
    return "ILS" if coef == 0 else f"NILS-{coef:g}x"


def emit_reports(results: Sequence, outdir: str | Path) -> list[Path]:
    """Write aggregate tables, per-sample records and plot data; returns written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    degrees = [r for r in results if isinstance(r, DegreesResult)]
    plateaus = [r for r in results if isinstance(r, PlateauResult)]
    solves = [r for r in results if isinstance(r, SolveResult)]

    if degrees:
        p = outdir / "table1.csv"
        _write_csv(
            p,
            ["instance", "V", "chi", "nbh", "nd_random", "ratio_random", "nd_lo", "ratio_lo"],
            [d.row() for d in degrees],
        )
        written.append(p)
        rows = []
        for d in degrees:
            nbh = d.instance.nbh_size
            for i, (f, nd) in enumerate(zip(d.random_fitness, d.random_nd)):
                rows.append([d.instance.name, "random", i, f, nd, repr(nd / nbh)])
            for i, desc in enumerate(d.descents):
                rows.append([d.instance.name, "local_optimum", i, desc.fitness, desc.neutral_degree, repr(desc.neutral_ratio)])
        p = outdir / "degrees_samples.csv"
        _write_csv(p, ["instance", "kind", "sample", "fitness", "neutral_degree", "ratio"], rows)
        written.append(p)

    if plateaus:
        analysed = [r for r in plateaus if r.analysed]
        t2, t3, t4 = [], [], []
        descents, walks = [], []
        for r in analysed:
            b = r.battery
            name = r.instance.name
            t2.append([name, f"{b.rho1:.2f}", len(b.rho1_values)])
            counts = b.typology_counts
            t3.append([name, counts["T1"], counts["T2"], counts["T3"]])
            t4.append([name, counts["T3"], *b.nbs_summary.as_row(), *b.step_length_summary.as_row(), b.revisits])
            for i, w in enumerate(b.walks):
                ac = autocorrelation(w.nd_series) if len(w.nd_series) >= 2 else None
                walks.append(
                    {
                        "instance": name,
                        "walk": i,
                        "typology": w.typology,
                        "length_limit": w.length_limit,
                        "steps_taken": w.steps_taken,
                        "portal_index": w.portal_index,
                        "revisits": w.revisits,
                        "fitness": w.fitness,
                        "rho": [float(x) for x in ac.rho] if ac is not None and ac.defined else None,
                        "nd_series": list(w.nd_series),
                    }
                )
        for r in plateaus:
            for i, d in enumerate(r.battery.descents):
                descents.append(
                    {
                        "instance": r.instance.name,
                        "descent": i,
                        "step_length": d.step_length,
                        "evaluations": d.evaluations,
                        "start_fitness": d.start_fitness,
                        "fitness": d.fitness,
                        "neutral_degree": d.neutral_degree,
                        "neutral_ratio": d.neutral_ratio,
                    }
                )
        for fname, header, rows in (
            ("table2.csv", ["instance", "rho1", "walks_defined"], t2),
            ("table3.csv", ["instance", "T1", "T2", "T3"], t3),
            (
                "table4.csv",
                ["instance", "T3", "nbS_min", "nbS_med", "nbS_mean", "nbS_max",
                 "L_min", "L_med", "L_mean", "L_max", "revisits"],
                t4,
            ),
        ):
            _write_csv(outdir / fname, header, rows)
            written.append(outdir / fname)
        _write_jsonl(outdir / "descents.jsonl", descents)
        _write_jsonl(outdir / "walks.jsonl", walks)
        written += [outdir / "descents.jsonl", outdir / "walks.jsonl"]
        skipped = [r for r in plateaus if not r.analysed]
        if skipped:
            p = outdir / "notices.txt"
            p.write_text("".join(f"{r.instance.name}: walk analysis skipped ({r.skipped})\n" for r in skipped))
            written.append(p)

    if solves:
        long_rows, summary_rows, records = [], [], []
        for s in solves:
            name = s.instance.name
            ils = s.fitnesses(0.0) if 0.0 in s.runs else None
            for coef, runs in s.runs.items():
                label = _mns_label(coef)
                fits = [r.best_fitness for r in runs]
                for i, r in enumerate(runs):
                    long_rows.append([name, label, f"{coef:g}", i, r.best_fitness, r.evaluations_used])
                    rec = r.to_dict()
                    rec.update(instance=name, run=i, mns_coef=coef)
                    records.append(rec)
                summ = StatSummary.of(fits)
                if ils is not None and coef != 0.0:
                    diff = f"{summ.median - float(np.median(ils)):g}"
                    if len(set(fits) | set(ils)) > 1:
                        pval = stats.mannwhitneyu(fits, ils, alternative="less").pvalue
                        pval = f"{pval:.4g}"
                    else:
                        pval = "1"
                else:
                    diff, pval = "", ""
                summary_rows.append(
                    [name, label, f"{coef:g}", len(runs), *summ.as_row(),
                     sum(r.legal_found for r in runs), diff, pval]
                )
        _write_csv(
            outdir / "solve_long.csv", ["instance", "config", "mns", "run", "fitness", "evaluations"], long_rows
        )
        _write_csv(
            outdir / "solve_summary.csv",
            ["instance", "config", "mns", "runs", "min", "median", "mean", "max",
             "legal_runs", "median_minus_ils", "p_less_than_ils"],
            summary_rows,
        )
        _write_jsonl(outdir / "runs.jsonl", records)
        written += [outdir / "solve_long.csv", outdir / "solve_summary.csv", outdir / "runs.jsonl"]
    return written


def run_experiment(config: ExperimentConfig) -> list[Path]:
    """Run ``config.mode`` end to end and write its reports."""
    instances = load_instances(config)
    results: list = []
    if config.mode in ("degrees", "full"):
        degrees = run_degrees(config, instances)
        results += degrees
    if config.mode == "plateaus":
        results += run_plateaus(config, instances)
    elif config.mode == "full":
        results += run_plateaus(config, degrees=degrees)
    if config.mode in ("solve", "full"):
        results += run_solve(config, instances)
    return emit_reports(results, config.out)
