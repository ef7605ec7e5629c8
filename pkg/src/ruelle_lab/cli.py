"""Command-line front end: ``ruelle-lab {rpf,scan,verify,entropy,sample}``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import checks
from .config import ConfigError, RunConfig, load_config
from .entropy import relative_entropy_rate_empirical, specific_entropy_limit, specific_entropy_markov
from .errors import RuelleLabError
from .measures import integrate_local, sample_path
from .transfer import build, normalization_residual, normalize, rpf_solve, solve, spectral_radius_estimate
from .variational import equilibrium_state

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x) + 0.0, ".17g")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _pmap(fn, items, jobs: int):
    """Ordered map; runs in worker processes when ``jobs > 1``."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


class Manifest:
    def __init__(self, cfg: RunConfig, command: str):
        self.cfg = cfg
        self.data = {
            "command": command,
            "version": __version__,
            "config": cfg.raw,
            "seed": cfg.seed,
            "started": _now(),
            "verdicts": [],
            "outputs": [],
        }

    def output(self, path: Path) -> Path:
        self.data["outputs"].append(str(path))
        return path

    def write(self) -> Path:
        self.data["finished"] = _now()
        path = self.cfg.out_dir / "manifest.json"
        path.write_text(json.dumps(self.data, indent=2, default=float))
        return path


# -- rpf ------------------------------------------------------------------

def cmd_rpf(cfg: RunConfig) -> int:
    man = Manifest(cfg, "rpf")
    M = build(cfg.potential)
    S = rpf_solve(M, tol=cfg.tol, max_iter=cfg.max_iter)
    fbar = normalize(cfg.potential, S)
    report = S.to_dict()
    report["normalization_residual"] = normalization_residual(fbar)
    report["spectral_radius"] = spectral_radius_estimate(cfg.potential, int(cfg.raw.get("radius_n", 50)), S)
    report["order"] = M.order
    path = man.output(cfg.out_dir / "rpf.json")
    path.write_text(json.dumps(report, indent=2))
    man.write()
    print(f"lambda = {S.lam:.15g}  log lambda = {S.log_lambda:.15g}  iterations = {S.iterations}")
    return EXIT_OK


# -- scan -----------------------------------------------------------------

def scan_row(args) -> dict:
    base, beta = args
    row = {"beta": beta}
    try:
        f = base * beta
        S = solve(f)
        mu = equilibrium_state(f, S)
        energy = integrate_local(mu, base)
        hs = specific_entropy_markov(mu)
        row.update(pressure=S.log_lambda, energy=energy, entropy=hs,
                   identity_residual=abs(hs + beta * energy - S.log_lambda), status="ok")
    except (RuelleLabError, FloatingPointError, OverflowError) as exc:
        row.update(pressure=None, energy=None, entropy=None, identity_residual=None,
                   status=f"error: {exc}")
    return row


def _scan_grid(cfg: RunConfig) -> list:
    sec = cfg.section("scan")
    if "betas" in sec:
        grid = [float(b) for b in sec["betas"]]
    else:
        num = int(sec.get("num", 9))
        grid = np.linspace(float(sec.get("start", 0.0)), float(sec.get("stop", 2.0)), num).tolist()
    if not grid:
        raise ConfigError("scan grid is empty")
    return grid


def cmd_scan(cfg: RunConfig) -> int:
    man = Manifest(cfg, "scan")
    grid = _scan_grid(cfg)
    rows = _pmap(scan_row, [(cfg.potential, b) for b in grid], cfg.jobs)
    path = man.output(cfg.out_dir / "scan.csv")
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        cols = ["beta", "pressure", "energy", "entropy", "identity_residual"]
        w.writerow(cols + ["status"])
        for r in rows:
            w.writerow([_fmt(r[c]) for c in cols] + [r["status"]])
    ok = [r for r in rows if r["status"] == "ok"]
    worst = max((r["identity_residual"] for r in ok), default=0.0)
    man.data["verdicts"].append(checks.verdict("scan.identity", worst, 1e-10, rows=len(rows)))
    if len(ok) >= 3:
        p = [r["pressure"] for r in ok]
        d2 = float(np.min(np.diff(p, 2))) if len(p) >= 3 else 0.0
        man.data["verdicts"].append(checks.verdict("scan.pressure_convexity", -d2, 1e-10))
    if cfg.figures:
        from .plotting import plot_scan
        plot_scan(rows, man.output(cfg.out_dir / "scan.png"))
    man.write()
    print(f"wrote {len(rows)} rows to {path}")
    return EXIT_OK if len(ok) == len(rows) else EXIT_NUMERIC


# -- verify ---------------------------------------------------------------

def _suite_job(args):
    name, f, params = args
    return checks.run_suite(name, f, params)


def cmd_verify(cfg: RunConfig, which: str) -> int:
    man = Manifest(cfg, f"verify {which}")
    suites = checks.SUITES if which == "all" else (which,)
    params = dict(cfg.section("verify"))
    params.setdefault("seed", cfg.seed)
    params.setdefault("n_max", cfg.n_max)
    results = _pmap(_suite_job, [(s, cfg.potential, params) for s in suites], cfg.jobs)
    verdicts = [v for block in results for v in block]
    man.data["verdicts"] = verdicts
    path = man.output(cfg.out_dir / "verify.json")
    path.write_text(json.dumps({"verdicts": verdicts}, indent=2))
    man.write()
    for v in verdicts:
        status = "PASS" if v["pass"] else "FAIL"
        tol = "" if v["tolerance"] is None else f" (tol {v['tolerance']:.1e}, {v['comparison']})"
        print(f"{status}  {v['check']}: {v['residual']:.3e}{tol}")
    return EXIT_OK if checks.all_pass(verdicts) else EXIT_VERIFY


# -- entropy --------------------------------------------------------------

def cmd_entropy(cfg: RunConfig) -> int:
    man = Manifest(cfg, "entropy")
    sec = cfg.section("entropy")
    n_max = int(sec.get("n_max", cfg.n_max))
    mu_f = equilibrium_state(cfg.potential)
    mu = cfg.measure(sec.get("measure", "gibbs"), mu_f)
    reference = sec.get("reference", "product")
    if reference == "product":
        report = specific_entropy_limit(mu, cfg.alphabet, n_max)
    elif reference == "gibbs":
        report = relative_entropy_rate_empirical(mu, mu_f, n_max)
    else:
        raise ConfigError(f"unknown entropy reference {reference!r}")
    man.output(cfg.out_dir / "entropy.csv").write_text(report.to_csv())
    man.output(cfg.out_dir / "entropy.json").write_text(report.to_json())
    man.data["verdicts"].append(checks.verdict("entropy.affine_residual", report.affine_residual, 1e-12))
    if cfg.figures:
        from .plotting import plot_entropy
        plot_entropy(report, man.output(cfg.out_dir / "entropy.png"))
    man.write()
    print(f"{report.label}: limit {report.extrapolated_limit:.12g} (affine residual {report.affine_residual:.2e})")
    return EXIT_OK


# -- sample ---------------------------------------------------------------

def cmd_sample(cfg: RunConfig) -> int:
    man = Manifest(cfg, "sample")
    sec = cfg.section("sample")
    length = int(sec.get("length", 1000))
    if length < 0:
        raise ConfigError("sample.length must be >= 0")
    mu = cfg.measure(sec.get("measure", "gibbs"))
    path = man.output(cfg.out_dir / "sample.csv")
    word = sample_path(mu, length, cfg.seed)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["position", "symbol"])
        for i, s in enumerate(word.tolist(), start=1):
            w.writerow([i, s])
    man.write()
    print(f"wrote {length} symbols to {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON run configuration")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--jobs", type=int, default=None)
    common.add_argument("--no-figures", action="store_true", help="skip PNG figures")

    parser = argparse.ArgumentParser(prog="ruelle-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("rpf", parents=[common], help="maximal spectral data of the transfer operator")
    sub.add_parser("scan", parents=[common], help="pressure / energy / entropy over an inverse-temperature grid")
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("which", nargs="?", default="all", choices=checks.SUITES + ("all",))
    sub.add_parser("entropy", parents=[common], help="finite-volume entropy report")
    sub.add_parser("sample", parents=[common], help="sample a path from a Markov measure")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = load_config(args.config, args.out, args.seed, args.jobs)
        if args.no_figures:
            cfg.figures = False
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "rpf":
            return cmd_rpf(cfg)
        if args.command == "scan":
            return cmd_scan(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.which)
        if args.command == "entropy":
            return cmd_entropy(cfg)
        if args.command == "sample":
            return cmd_sample(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RuelleLabError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
