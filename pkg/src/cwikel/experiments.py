"""Experiment orchestration: configs in, deterministic reports out.

A Report carries CSV-able tables plus a list of named checks; every checked
inequality records its two sides, the slack it was granted, and the verdict.
Exit semantics live in the CLI: any failed check makes the run nonzero.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .covering import build_equal_j_covering, verify_covering
from .errors import ConfigError, IoError
from .fields import SampledFunction, decreasing_rearrangement
from .approx import apply_Kn, build_Kn, hom_seminorm, weighted_error
from .inversion import (appendix_a_checks, counterexample_growth, rd_rhs_norm,
                        small_ball_lower_bound, split_norm)
from .orlicz import orlicz_norm
from .spectral import (assemble_cwikel, birman_schwinger_count, cwikel_ratio,
                       singular_values, weak_quasinorm)

__all__ = ["ExperimentConfig", "Check", "Report", "run", "emit_plots", "worker_count"]

KINDS = ("rearrange", "cover", "approx", "spectrum", "sweep",
         "counterexample", "equivalence", "bs-count")


def worker_count() -> int:
    """Parallelism cap from CWIKEL_THREADS (default: sequential)."""
    try:
        return max(1, int(os.environ.get("CWIKEL_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class ExperimentConfig:
    kind: str
    inputs: dict = field(default_factory=dict)   # name -> path
    params: dict = field(default_factory=dict)
    seed: int = 0
    out_dir: str = "."

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(json.dumps({"kind": self.kind, "params": self.params,
                             "seed": self.seed}, sort_keys=True).encode())
        for name in sorted(self.inputs):
            h.update(name.encode())
            p = Path(self.inputs[name])
            if p.exists():
                h.update(p.read_bytes())
        return h.hexdigest()[:16]

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from exc
        return cls(kind=data["kind"], inputs=data.get("inputs", {}),
                   params=data.get("params", {}), seed=data.get("seed", 0),
                   out_dir=data.get("out_dir", "."))


@dataclass
class Check:
    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool

    def row(self):
        return (self.name, repr(self.lhs), repr(self.rhs), repr(self.slack),
                "pass" if self.passed else "FAIL")


@dataclass
class Report:
    experiment: str
    digest: str
    tables: dict  # name -> (header tuple, list of row tuples)
    checks: list
    wall_clock: float

    def failed(self) -> bool:
        return any(not c.passed for c in self.checks)

    def summary_lines(self):
        lines = [f"experiment={self.experiment} digest={self.digest} wall={self.wall_clock:.2f}s"]
        for c in self.checks:
            mark = "pass" if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name}: lhs={c.lhs:.6g} rhs={c.rhs:.6g} slack={c.slack:.3g}")
        return lines

    def write_tables(self, out_dir) -> list:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for name, (header, rows) in self.tables.items():
            path = out_dir / f"{self.experiment}_{name}.csv"
            try:
                with open(path, "w") as fh:
                    fh.write(",".join(header) + "\n")
                    for row in rows:
                        fh.write(",".join(repr(x) if isinstance(x, float) else str(x)
                                          for x in row) + "\n")
            except OSError as exc:
                raise IoError(str(exc)) from exc
            written.append(path)
        if self.checks:
            path = out_dir / f"{self.experiment}_checks.csv"
            with open(path, "w") as fh:
                fh.write("check,lhs,rhs,slack,verdict\n")
                for c in self.checks:
                    fh.write(",".join(c.row()) + "\n")
            written.append(path)
        return written

    def to_json(self, path) -> None:
        payload = {
            "experiment": self.experiment,
            "digest": self.digest,
            "wall_clock": self.wall_clock,
            "checks": [c.row() for c in self.checks],
            "tables": {k: {"header": list(h), "rows": [list(r) for r in rows]}
                       for k, (h, rows) in self.tables.items()},
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)


def _load_field(cfg: ExperimentConfig, name: str) -> SampledFunction:
    if name not in cfg.inputs:
        raise ConfigError(f"experiment {cfg.kind!r} needs input {name!r}")
    return SampledFunction.load(cfg.inputs[name])


def _run_rearrange(cfg: ExperimentConfig):
    f = _load_field(cfg, "f")
    mu = decreasing_rearrangement(f)
    left = 0.0
    rows = []
    for right, v in zip(mu.breakpoints, mu.values):
        rows.append((left, float(right), float(v)))
        left = float(right)
    tables = {"mu": (("t_left", "t_right", "value"), rows),
              "norms": (("norm", "value"),
                        [("llogl", orlicz_norm(mu))])}
    return tables, []


def _run_cover(cfg: ExperimentConfig):
    f = _load_field(cfg, "f")
    n = int(cfg.params.get("n", 16))
    cov = build_equal_j_covering(f, n)
    rep = verify_covering(f, cov, n)
    out = Path(cfg.params.get("out", Path(cfg.out_dir) / "covering.json"))
    out.parent.mkdir(parents=True, exist_ok=True)
    cov.to_json(out)
    rows = [(i, ",".join(f"{c:.6f}" for c in cube.center), cube.side, jv)
            for i, (cube, jv) in enumerate(zip(cov.cubes, cov.j_values))]
    tables = {"cubes": (("index", "center", "side", "j_value"), rows),
              "stats": (("stat", "value"),
                        [("coverage", rep.coverage_fraction),
                         ("max_multiplicity", rep.max_multiplicity),
                         ("max_rel_j_deviation", rep.max_rel_j_deviation),
                         ("cube_count", rep.cube_count),
                         ("families", rep.family_count)])}
    checks = [
        Check("coverage: every cell in some cube", rep.coverage_fraction, 1.0, 0.0,
              rep.coverage_fraction == 1.0),
        Check("equal-budget: max |J - target|/target <= 1e-3",
              rep.max_rel_j_deviation, 1e-3, 0.0, rep.max_rel_j_deviation <= 1e-3),
        Check("families pairwise disjoint", float(rep.families_disjoint), 1.0, 0.0,
              rep.families_disjoint),
    ]
    return tables, checks


def _run_approx(cfg: ExperimentConfig):
    f = _load_field(cfg, "f")
    u = _load_field(cfg, "u")
    n = int(cfg.params.get("n", 16))
    K = build_Kn(f, n)
    err = weighted_error(f, u, K)
    hom = hom_seminorm(u)
    norm_f = orlicz_norm(decreasing_rearrangement(f))
    normalized = n * err / (norm_f * hom * hom) if hom > 0 else float("nan")
    tables = {"errors": (("n", "rank_bound", "error", "normalized"),
                         [(n, K.rank_bound, err, normalized)])}
    checks = [Check("projection error finite", err, float("inf"), 0.0, np.isfinite(err))]
    return tables, checks


def _run_spectrum(cfg: ExperimentConfig):
    f = _load_field(cfg, "f")
    N = int(cfg.params.get("N", 16))
    p = float(cfg.params.get("p", 1.0))
    spec = singular_values(assemble_cwikel(f, N))
    qn = weak_quasinorm(spec, p)
    tables = {"spectrum": (("k", "mu_k", "scaled"),
                           [(k, mu, (k + 1) ** (1.0 / p) * mu)
                            for k, mu in enumerate(spec.values)]),
              "quasinorm": (("p", "value"), [(p, qn)])}
    return tables, []


def _run_sweep(cfg: ExperimentConfig):
    f = _load_field(cfg, "f")
    Ns = [int(x) for x in cfg.params.get("Ns", [8, 16, 32])]
    f_id = cfg.params.get("f_id", Path(cfg.inputs["f"]).stem)
    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            ratios = list(pool.map(lambda N: cwikel_ratio(f, N), Ns))
    else:
        ratios = [cwikel_ratio(f, N) for N in Ns]
    rows = [(f_id, N, r) for N, r in zip(Ns, ratios)]
    checks = []
    if len(ratios) >= 2:
        drift = abs(ratios[-1] - ratios[-2]) / ratios[-2]
        checks.append(Check("truncation stability: ratio drift < 20% at top N",
                            drift, 0.2, 0.0, drift < 0.2))
    return {"sweep": (("f_id", "N", "ratio"), rows)}, checks


def _run_counterexample(cfg: ExperimentConfig):
    d = int(cfg.params.get("d", 1))
    ns = [int(x) for x in cfg.params.get("ns", [2, 4, 8, 16])]
    N = int(cfg.params.get("N", 96))
    resolution = cfg.params.get("resolution")
    rec = counterexample_growth(ns, d, N, resolution=resolution)
    rows = [(n, q, fit, res) for (n, q, fit, res) in rec.rows()]
    qs = rec.q_values
    norms = np.array(rec.norms)
    checks = [
        Check("q_n strictly increasing", float(np.min(np.diff(qs))), 0.0, 0.0,
              bool(np.all(np.diff(qs) > 0))),
        Check("growth fit slope positive", rec.slope, 0.0, 0.0, rec.slope > 0),
        Check("||f_n|| constant to 1%", float(norms.max() / norms.min()), 1.01, 0.0,
              bool(norms.max() / norms.min() <= 1.01)),
    ]
    tables = {"growth": (("n", "q_n", "fit", "residual"), rows),
              "norms": (("n", "llogl_norm"), list(zip(rec.ns, rec.norms)))}
    return tables, checks


def _run_equivalence(cfg: ExperimentConfig):
    f = _load_field(cfg, "f")
    split = split_norm(f)
    rhs = rd_rhs_norm(f)
    ratio = split / rhs if rhs > 0 else float("nan")
    appendix = appendix_a_checks(f)
    out = Path(cfg.params.get("out", Path(cfg.out_dir) / "equivalence.json"))
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        json.dump({"split_norm": split, "rhs_norm": rhs, "ratio": ratio,
                   "appendix": {k: {kk: (bool(vv) if isinstance(vv, (bool, np.bool_)) else float(vv))
                                    for kk, vv in v.items()} for k, v in appendix.items()}},
                  fh, indent=1)
    checks = [
        Check("interior bound with constant 2d+2 (5% slack)",
              appendix["interior_bound"]["lhs"],
              appendix["interior_bound"]["rhs"], 0.05,
              bool(appendix["interior_bound"]["holds"])),
        Check("exterior bound with constant 1 (5% slack)",
              appendix["exterior_bound"]["lhs"],
              appendix["exterior_bound"]["rhs"], 0.05,
              bool(appendix["exterior_bound"]["holds"])),
    ]
    tables = {"equivalence": (("split_norm", "rhs_norm", "ratio"),
                              [(split, rhs, ratio)])}
    return tables, checks


def _run_bs_count(cfg: ExperimentConfig):
    f = _load_field(cfg, "f")
    t = float(cfg.params.get("t", 0.5))
    N = int(cfg.params.get("N", 6))
    c1, c2 = birman_schwinger_count(f, t, N)
    tables = {"bs": (("t", "N", "count_cwikel", "count_schrodinger"),
                     [(t, N, c1, c2)])}
    checks = [Check("counting identity: counts equal exactly",
                    float(c1), float(c2), 0.0, c1 == c2)]
    return tables, checks


_RUNNERS = {
    "rearrange": _run_rearrange,
    "cover": _run_cover,
    "approx": _run_approx,
    "spectrum": _run_spectrum,
    "sweep": _run_sweep,
    "counterexample": _run_counterexample,
    "equivalence": _run_equivalence,
    "bs-count": _run_bs_count,
}


def run(config: ExperimentConfig) -> Report:
    """Execute one experiment; deterministic for a fixed config and seed."""
    t0 = time.time()
    np.random.seed(config.seed)
    tables, checks = _RUNNERS[config.kind](config)
    return Report(experiment=config.kind, digest=config.digest(),
                  tables=tables, checks=checks, wall_clock=time.time() - t0)


# -- plotting -------------------------------------------------------------------


def emit_plots(report: Report, out_dir) -> list:
    """One SVG per sweep-like table; empty tables produce a warning only."""
    import matplotlib
    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "cwikel"
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def save(fig, name):
        path = out_dir / f"{report.experiment}_{name}.svg"
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(path)

    for name, (header, rows) in report.tables.items():
        if not rows:
            print(f"warning: table {name} is empty, no plot emitted")
            continue
        if name == "sweep":
            fig, ax = plt.subplots()
            ns = [r[1] for r in rows]
            ax.plot(ns, [r[2] for r in rows], "o-")
            ax.set_xlabel("lattice cutoff N")
            ax.set_ylabel("quasi-norm / Orlicz-norm ratio")
            save(fig, name)
        elif name == "growth":
            fig, ax = plt.subplots()
            x = np.sqrt(np.log([r[0] for r in rows]))
            ax.plot(x, [r[1] for r in rows], "o", label="measured")
            ax.plot(x, [r[2] for r in rows], "-", label="a + b sqrt(log n)")
            ax.set_xlabel("sqrt(log n)")
            ax.set_ylabel("weak 2,inf quasi-norm")
            ax.legend()
            save(fig, name)
        elif name == "errors":
            fig, ax = plt.subplots()
            ax.plot([r[0] for r in rows], [r[3] for r in rows], "o-")
            ax.set_xlabel("n")
            ax.set_ylabel("n * error / (norm * seminorm^2)")
            save(fig, name)
        elif name == "spectrum":
            fig, ax = plt.subplots()
            ks = [r[0] for r in rows]
            ax.semilogy(ks, [r[1] for r in rows], ".", label="mu_k")
            ax.semilogy(ks, [r[2] for r in rows], ".", label="(k+1) mu_k")
            ax.set_xlabel("k")
            ax.legend()
            save(fig, name)
    return written
