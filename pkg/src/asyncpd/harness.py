"""CLI entry point: parse configs, build experiments, run seed sweeps, persist traces."""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import metrics, problems as problems_mod, schedules
from .graph import build_topology
from .solver_adpd import adpd_run
from .solver_aasdcs import aasdcs_run

OUTPUT_ROOT_ENV = "ASYNCPD_OUT_ROOT"


class ConfigError(ValueError):
    """Bad experiment configuration."""


@dataclass
class ExperimentConfig:
    N: int
    topology: str = "ring"
    m: int = 4
    p: float = 0.5
    topology_seed: int = 0
    problem: str = "quadratic"
    dim: int = 4
    quad_weight: float = 1.0
    sigma: float = 0.0
    problem_seed: int = 0
    dataset: str | None = None
    subsample: int | None = None
    reg_weight: float | None = None
    algo: str = "adpd"
    regime: str = "auto"
    seeds: list[int] = field(default_factory=lambda: [0])
    D: float | None = None
    T_k: int | None = None
    out: str | None = None
    log_every: int | None = None
    timing: bool = False

    def __post_init__(self):
        if self.N < 1:
            raise ConfigError(f"need N >= 1, got {self.N}")
        if self.topology not in ("ring", "path", "complete", "erdos_renyi"):
            raise ConfigError(f"unknown topology {self.topology!r}")
        if self.problem not in ("quadratic", "svm_l1", "svm_l2"):
            raise ConfigError(f"unknown problem {self.problem!r}")
        if self.algo not in ("adpd", "aasdcs"):
            raise ConfigError(f"unknown algo {self.algo!r}")
        if self.regime not in ("auto", "convex", "strongly_convex"):
            raise ConfigError(f"unknown regime {self.regime!r}")
        if self.algo == "adpd" and self.problem.startswith("svm"):
            raise ConfigError(
                "algo=adpd needs objectives with an exact local prox; the hinge-loss "
                "SVM problems have none — use algo=aasdcs"
            )
        if self.problem.startswith("svm") and not self.dataset:
            raise ConfigError("svm problems need dataset=<path>")
        if not self.seeds:
            raise ConfigError("need at least one seed")

    @property
    def out_dir(self) -> Path:
        if self.out:
            return Path(self.out)
        return Path(os.environ.get(OUTPUT_ROOT_ENV, "runs"))

    @property
    def effective_log_every(self) -> int:
        if self.log_every is not None:
            return self.log_every
        return max(1, self.N // 20)


_PARSERS = {
    "N": int,
    "topology": str,
    "m": int,
    "p": float,
    "topology_seed": int,
    "problem": str,
    "dim": int,
    "quad_weight": float,
    "sigma": float,
    "problem_seed": int,
    "dataset": str,
    "subsample": int,
    "reg_weight": float,
    "algo": str,
    "regime": str,
    "seeds": lambda s: [int(tok) for tok in s.split(",") if tok.strip()],
    "D": float,
    "T_k": int,
    "out": str,
    "log_every": int,
    "timing": lambda s: {"true": True, "false": False}[s.lower()],
}


def parse_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    """Flat key=value config file; CLI flag overrides win; unknown keys error."""
    raw: dict[str, str] = {}
    if path is not None:
        with open(path, encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{line_no}: expected key=value, got {line!r}")
                key, _, val = line.partition("=")
                raw[key.strip()] = val.strip()
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    unknown = sorted(set(raw) - set(_PARSERS))
    if unknown:
        raise ConfigError(
            f"unknown config key(s) {unknown}; valid keys: {sorted(_PARSERS)}"
        )
    if "N" not in raw:
        raise ConfigError("config must set N (no default iteration budget)")
    kwargs = {}
    for key, val in raw.items():
        if isinstance(val, str):
            try:
                kwargs[key] = _PARSERS[key](val)
            except (ValueError, KeyError) as exc:
                raise ConfigError(f"bad value {val!r} for key {key}") from exc
        else:
            kwargs[key] = val
    return ExperimentConfig(**kwargs)


def build_experiment(cfg: ExperimentConfig):
    """Materialize (topology, per-agent objectives, outer schedule) from a config."""
    topo = build_topology(cfg.topology, cfg.m, p=cfg.p, seed=cfg.topology_seed)
    if cfg.problem == "quadratic":
        rng = np.random.default_rng(np.random.SeedSequence([cfg.problem_seed, 2]))
        centers = rng.normal(size=(cfg.m, cfg.dim))
        probs = problems_mod.make_quadratic_problem(centers, cfg.quad_weight, sigma=cfg.sigma)
    else:
        data = problems_mod.load_libsvm(
            cfg.dataset, num_agents=cfg.m, subsample=cfg.subsample, seed=cfg.problem_seed
        )
        reg = "l1" if cfg.problem == "svm_l1" else "l2"
        probs = problems_mod.make_svm_problem(
            data, topo, reg=reg, reg_weight=cfg.reg_weight, sigma_seed=cfg.problem_seed
        )
    consts = probs[0].constants
    if cfg.algo == "adpd":
        sched = schedules.adpd_schedule(cfg.m, topo.d_max, cfg.N)
    else:
        regime = cfg.regime
        if regime == "auto":
            regime = "strongly_convex" if consts.mu > 0 else "convex"
        if regime == "strongly_convex":
            if consts.mu <= 0:
                raise ConfigError("regime=strongly_convex needs mu > 0")
            sched = schedules.aasdcs_strong_schedule(
                cfg.m, topo.d_max, cfg.N, consts, D=cfg.D, T_override=cfg.T_k
            )
        else:
            sched = schedules.aasdcs_convex_schedule(
                cfg.m, topo.d_max, cfg.N, consts, D=cfg.D, T_override=cfg.T_k
            )
    return topo, probs, sched


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Run the seed sweep, write one trace CSV per seed plus summary.csv."""
    topo, probs, sched = build_experiment(cfg)
    report = schedules.validate_schedule(sched, cfg.m, topo.d_max, sched.consts)
    if not report.ok:
        raise schedules.ScheduleInfeasibleError(str(report))
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    runner = adpd_run if cfg.algo == "adpd" else aasdcs_run
    x0 = np.zeros((cfg.m, probs[0].dim))
    traces = []
    for seed in cfg.seeds:
        _, trace = runner(
            topo, probs, sched, x0, seed,
            log_every=cfg.effective_log_every, timing=cfg.timing,
        )
        trace.validate()
        trace.to_csv(out / f"{cfg.algo}_{seed}.csv")
        traces.append(trace)
    write_summary(out / "summary.csv", traces)
    return out


def write_summary(path, traces) -> None:
    """Per-checkpoint seed means/stds; checkpoint grids align across seeds."""
    ks = traces[0].k
    if any(t.k != ks for t in traces):
        raise ValueError("seed traces logged on different checkpoint grids")
    obj = np.array([t.objective for t in traces])
    feas = np.array([t.feasibility for t in traces])
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(
            ["k", "comm_rounds", "grad_evals", "objective_mean", "objective_std",
             "feasibility_mean", "feasibility_std", "num_seeds"]
        )
        for i, k in enumerate(ks):
            w.writerow(
                [
                    k,
                    traces[0].comm_rounds[i],
                    traces[0].grad_evals[i],
                    repr(float(obj[:, i].mean())),
                    repr(float(obj[:, i].std())),
                    repr(float(feas[:, i].mean())),
                    repr(float(feas[:, i].std())),
                    len(traces),
                ]
            )


def _cfg_from_args(args) -> ExperimentConfig:
    overrides = {
        "algo": args.algo,
        "m": args.m,
        "N": args.N,
        "seeds": args.seeds,
        "out": args.out,
    }
    return parse_config(args.config, overrides)


def cmd_run(args) -> int:
    cfg = _cfg_from_args(args)
    out = run_experiment(cfg)
    print(f"wrote {len(cfg.seeds)} trace file(s) and summary.csv to {out}")
    return 0


def cmd_validate(args) -> int:
    cfg = _cfg_from_args(args)
    _, _, sched = build_experiment(cfg)
    report = schedules.validate_schedule(sched, cfg.m, sched.d_max, sched.consts)
    print(report)
    return 0 if report.ok else 1


def cmd_reference(args) -> int:
    cfg = _cfg_from_args(args)
    _, probs, _ = build_experiment(cfg)
    ref = metrics.centralized_reference(probs)
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    path = out / "reference.csv"
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["F_star", "method", "certificate", "x_star"])
        w.writerow(
            [repr(ref.F_star), ref.method, repr(ref.certificate),
             " ".join(repr(float(v)) for v in ref.x_star)]
        )
    print(f"F* = {ref.F_star} ({ref.method}, certificate {ref.certificate}); wrote {path}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asyncpd",
        description="Asynchronous decentralized primal-dual solvers over simulated networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("run", cmd_run), ("validate", cmd_validate), ("reference", cmd_reference)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--algo", choices=["adpd", "aasdcs"])
        p.add_argument("--m", type=int)
        p.add_argument("--N", type=int)
        p.add_argument("--seeds", help="comma-separated seed list, e.g. 1,2,3")
        p.add_argument("--out")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
