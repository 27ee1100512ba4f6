"""Command-line front end.

Exit status: 0 when every checked margin is at least ``-tolerance``, 1 when an
inequality fails beyond tolerance, 2 on usage or input errors.  The default
seed can be overridden with the ``LPSTAB_SEED`` environment variable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import jensen, mixed, planar, sharpness
from .random_instances import DEFAULT_SEED, instance_rng, random_distribution, random_polygon_pair

COMMANDS = (
    "jensen-check",
    "psi-scan",
    "mixed-volume",
    "verify-theorem1",
    "verify-theorem2",
    "proof-chain",
    "sharpness-scan",
)
DEFAULT_TOLERANCE = {"jensen-check": 1e-10, "psi-scan": 1e-10}
SEED_ENV = "LPSTAB_SEED"


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


@dataclass
class RunConfig:
    command: str
    p: float | None = None
    n: int = 2
    directions: int = mixed.DEFAULT_DIRECTIONS
    seed: int = DEFAULT_SEED
    tolerance: float | None = None
    instances: int = 100
    inputs: list = field(default_factory=list)
    output: str | None = None
    format: str | None = None
    workers: int = 1
    a_steps: int = 99
    t_steps: int = 1000
    epsilons: list | None = None
    beta: bool = False
    rhs_scale: float = 1.0

    @property
    def tol(self) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return DEFAULT_TOLERANCE.get(self.command, 1e-9)

    @property
    def out_format(self) -> str:
        if self.format:
            return self.format
        if self.output and self.output.endswith(".json"):
            return "json"
        return "csv"

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in (None, "json", "csv"):
            raise UsageError("--format must be json or csv")
        if self.p is None:
            raise UsageError(f"{self.command} needs --p")
        if self.p <= 0:
            raise UsageError("--p must be positive")
        strict = {"verify-theorem1", "verify-theorem2", "proof-chain", "sharpness-scan"}
        if self.command in strict and self.p <= 1:
            raise UsageError(f"{self.command} needs --p > 1")
        if self.command == "mixed-volume":
            if self.p < 1:
                raise UsageError("mixed-volume needs --p >= 1")
            if len(self.inputs) != 2:
                raise UsageError("mixed-volume needs two body files: K L")
        if self.command == "psi-scan":
            if self.p == 1:
                raise UsageError("psi-scan needs --p != 1")
            if self.a_steps < 2 or self.t_steps < 2:
                raise UsageError("--a-steps and --t-steps must be at least 2")
        if self.command in ("verify-theorem1", "verify-theorem2", "proof-chain"):
            if len(self.inputs) not in (0, 2):
                raise UsageError(f"{self.command} takes either no input (random suite) or two bodies")
        if self.command == "sharpness-scan" and self.n < 2:
            raise UsageError("--n must be at least 2")
        if self.instances < 1:
            raise UsageError("--instances must be positive")
        if self.directions < 64:
            raise UsageError("--directions must be at least 64")
        if self.workers < 1:
            raise UsageError("--workers must be positive")


def fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load_body(path: str) -> planar.Body:
    data = _load_json(path)
    try:
        return planar.body_from_dict(data)
    except planar.NotConvex as exc:
        raise UsageError(f"{path}: not convex: {exc}") from None
    except (ValueError, TypeError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def load_polygon(path: str) -> planar.Polygon:
    body = load_body(path)
    poly = planar.as_polygon(body) if isinstance(body, planar.Dilate) else body
    if not isinstance(poly, planar.Polygon):
        raise UsageError(f"{path}: $.type: this command needs a polygon, got {body.kind!r}")
    return poly


def load_distribution(path: str) -> jensen.DiscreteDistribution:
    data = _load_json(path)
    try:
        return jensen.DiscreteDistribution.from_dict(data)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"{path}: {exc}") from None


@dataclass
class Outcome:
    header: list
    rows: list
    payload: dict
    failures: int
    stdout: str | None = None


def _pool_map(fn, items, workers):
    if workers == 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _jensen_instance(args):
    seed, index, p, rhs_scale = args
    d = random_distribution(instance_rng(seed, index))
    return jensen.stability_check(d, p, rhs_scale)


def run_jensen(cfg: RunConfig) -> Outcome:
    if cfg.inputs:
        reports = [jensen.stability_check(load_distribution(path), cfg.p, cfg.rhs_scale) for path in cfg.inputs]
        labels = [(i, path) for i, path in enumerate(cfg.inputs)]
    else:
        items = [(cfg.seed, i, cfg.p, cfg.rhs_scale) for i in range(cfg.instances)]
        reports = _pool_map(_jensen_instance, items, cfg.workers)
        labels = [(i, cfg.seed) for i in range(cfg.instances)]
    header = ["index", "source", "p", "deficit", "deviation", "c_p", "margin"]
    rows = [
        [i, src, r.p, r.deficit, r.deviation, r.c_p, r.margin] for (i, src), r in zip(labels, reports)
    ]
    fails = sum(r.margin < -cfg.tol for r in reports)
    payload = {"p": cfg.p, "instances": len(reports), "min_margin": min(r.margin for r in reports)}
    payload["reports"] = [r.to_dict() for r in reports]
    return Outcome(header, rows, payload, fails)


def run_psi(cfg: RunConfig) -> Outcome:
    g = jensen.psi_grid_oracle(cfg.p, cfg.a_steps, cfg.t_steps)
    header = ["p", "a_steps", "t_steps", "minimum", "a", "t", "t_step"]
    rows = [[cfg.p, cfg.a_steps, cfg.t_steps, g.minimum, g.a, g.t, g.t_step]]
    payload = dict(zip(header, rows[0]))
    return Outcome(header, rows, payload, int(g.minimum < -cfg.tol))


def run_mixed_volume(cfg: RunConfig) -> Outcome:
    K = load_polygon(cfg.inputs[0])
    L = load_body(cfg.inputs[1])
    v = mixed.mixed_volume_p(K, L, cfg.p)
    header = ["p", "mixed_volume"]
    return Outcome(header, [[cfg.p, v]], {"p": cfg.p, "mixed_volume": v}, 0, stdout=fmt(v))


def _theorem_instance(args):
    which, seed, index, p, directions, rhs_scale = args
    K, L = random_polygon_pair(seed, index)
    check = mixed.check_theorem_1 if which == 1 else mixed.check_theorem_2
    return check(K, L, p, directions, rhs_scale)


def run_theorem(cfg: RunConfig, which: int) -> Outcome:
    check = mixed.check_theorem_1 if which == 1 else mixed.check_theorem_2
    if cfg.inputs:
        K = load_polygon(cfg.inputs[0])
        L = load_body(cfg.inputs[1])
        reports = [check(K, L, cfg.p, cfg.directions, cfg.rhs_scale)]
    else:
        items = [(which, cfg.seed, i, cfg.p, cfg.directions, cfg.rhs_scale) for i in range(cfg.instances)]
        reports = _pool_map(_theorem_instance, items, cfg.workers)
    header = ["index", "seed", "p", "lhs", "rhs", "margin", "A", "sigma", "N"]
    rows = [
        [i, cfg.seed, r.p, r.lhs, r.rhs, r.margin, r.asymmetry, r.sigma, r.discretization]
        for i, r in enumerate(reports)
    ]
    # discretized checks are held to three times their own error estimate
    slack = [cfg.tol + (3 * r.estimated_error if which == 2 else 0.0) for r in reports]
    fails = sum(r.margin < -s for r, s in zip(reports, slack))
    payload = {
        "theorem": which,
        "p": cfg.p,
        "instances": len(reports),
        "min_margin": min(r.margin for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    return Outcome(header, rows, payload, fails)


def _chain_instance(args):
    seed, index, p = args
    K, L = random_polygon_pair(seed, index)
    return mixed.proof_chain(K, L, p)


def run_chain(cfg: RunConfig) -> Outcome:
    if cfg.inputs:
        reports = [mixed.proof_chain(load_polygon(cfg.inputs[0]), load_polygon(cfg.inputs[1]), cfg.p)]
    else:
        items = [(cfg.seed, i, cfg.p) for i in range(cfg.instances)]
        reports = _pool_map(_chain_instance, items, cfg.workers)
    steps = list(reports[0].margins)
    header = ["index", "seed", "p", "delta", "gamma", "gamma_p", "min_margin"] + steps
    rows = [
        [i, cfg.seed, r.p, r.delta, r.gamma, r.gamma_p, r.min_margin] + [r.margins[s] for s in steps]
        for i, r in enumerate(reports)
    ]
    fails = sum(r.min_margin < -cfg.tol for r in reports)
    payload = {
        "p": cfg.p,
        "instances": len(reports),
        "min_margin": min(r.min_margin for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    return Outcome(header, rows, payload, fails)


def run_sharpness(cfg: RunConfig) -> Outcome:
    eps = cfg.epsilons if cfg.epsilons else sharpness.DEFAULT_EPSILONS
    scan = sharpness.sharpness_scan(cfg.n, cfg.p, eps, include_beta=cfg.beta, n_directions=cfg.directions)
    header = list(sharpness.CSV_COLUMNS)
    rows = [
        [scan.n, scan.p, r.epsilon, r.delta_p, r.asymmetry, r.asymmetry_sq, "" if r.beta_p is None else r.beta_p]
        for r in scan.rows
    ]
    # the mixed-volume stability bound on the ball family; the scan itself has no pass/fail bound
    c = (cfg.p - 1) / (mixed.THEOREM1_DENOM * cfg.n**2)
    fails = sum(r.delta_p - c * r.asymmetry_sq < -cfg.tol for r in scan.rows)
    return Outcome(header, rows, scan.summary(), fails)


RUNNERS = {
    "jensen-check": run_jensen,
    "psi-scan": run_psi,
    "mixed-volume": run_mixed_volume,
    "verify-theorem1": lambda c: run_theorem(c, 1),
    "verify-theorem2": lambda c: run_theorem(c, 2),
    "proof-chain": run_chain,
    "sharpness-scan": run_sharpness,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lpstab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("inputs", nargs="*", help="body or distribution JSON files")
        sp.add_argument("--p", type=float)
        sp.add_argument("--n", type=int, default=2)
        sp.add_argument("--directions", "--N", dest="directions", type=int, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--tolerance", type=float, default=None)
        sp.add_argument("--instances", type=int, default=100)
        sp.add_argument("--output", "-o")
        sp.add_argument("--format", choices=("json", "csv"))
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--rhs-scale", type=float, default=1.0, help=argparse.SUPPRESS)
        if name == "psi-scan":
            sp.add_argument("--a-steps", type=int, default=99)
            sp.add_argument("--t-steps", type=int, default=1000)
        if name == "sharpness-scan":
            sp.add_argument("--epsilons", type=float, nargs="+")
            sp.add_argument("--beta", action="store_true", help="add beta_p column (n = 2 only)")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    directions = ns.directions
    if directions is None:
        directions = 8192 if ns.command == "sharpness-scan" else mixed.DEFAULT_DIRECTIONS
    return RunConfig(
        command=ns.command,
        p=ns.p,
        n=ns.n,
        directions=directions,
        seed=default_seed() if ns.seed is None else ns.seed,
        tolerance=ns.tolerance,
        instances=ns.instances,
        inputs=list(ns.inputs),
        output=ns.output,
        format=ns.format,
        workers=ns.workers,
        a_steps=getattr(ns, "a_steps", 99),
        t_steps=getattr(ns, "t_steps", 1000),
        epsilons=getattr(ns, "epsilons", None),
        beta=getattr(ns, "beta", False),
        rhs_scale=ns.rhs_scale,
    )


def render(cfg: RunConfig, out: Outcome) -> str:
    if cfg.out_format == "json":
        return json.dumps(out.payload, indent=2, sort_keys=True) + "\n"
    return _csv(out.header, out.rows)


def run(cfg: RunConfig) -> int:
    cfg.validate()
    out = RUNNERS[cfg.command](cfg)
    text = render(cfg, out)
    if cfg.output:
        write_atomic(cfg.output, text)
        if cfg.command == "sharpness-scan" and cfg.out_format == "csv":
            stem = Path(cfg.output)
            write_atomic(str(stem.with_suffix(".summary.json")), json.dumps(out.payload, indent=2, sort_keys=True) + "\n")
        if out.stdout is not None:
            print(out.stdout)
    elif out.stdout is not None:
        print(out.stdout)
    else:
        sys.stdout.write(text)
        if cfg.command == "sharpness-scan" and cfg.out_format == "csv":
            sys.stderr.write(json.dumps(out.payload, indent=2, sort_keys=True) + "\n")
    if out.failures:
        print(f"{cfg.command}: {out.failures} check(s) failed beyond tolerance {cfg.tol!r}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return run(config_from_args(ns))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
