"""Command-line interface: run, sweep, mstar, and bounds subcommands.

Experiments are described by a TOML spec file.  Outputs are CSV tables plus
a manifest.json describing the resolved configuration; reruns of the same
spec produce byte-identical files regardless of thread count (the manifest
deliberately excludes thread counts and filesystem paths).

Exit codes: 0 success, 2 spec file missing, 3 malformed spec (bad TOML,
wrong type, unknown key or method name), 4 invariant violation (values
that parse but describe an impossible model or experiment).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import __version__
from .model import (
    AttackModel,
    DomainError,
    SensorModel,
    TrustModel,
    ValidityError,
    resolve_malicious_count,
)
from .sim import (
    METHOD_NAMES,
    ScenarioConfig,
    build_methods,
    run_experiment,
    sweep_malicious_proportion,
)
from .two_stage import (
    BoundRegion,
    WorstCaseConfig,
    error_upper_bound,
    m_star_noiseless_exact,
    m_star_normal_approx,
    optimize_thresholds,
    trust_probabilities,
)

__all__ = ["SpecError", "ExperimentSpec", "parse_spec", "main"]

EXIT_MISSING_SPEC = 2
EXIT_MALFORMED = 3
EXIT_INVARIANT = 4


class SpecError(Exception):
    """Spec-file problem carrying the CLI exit code."""

    def __init__(self, message: str, exit_code: int) -> None:
        super().__init__(message)
        self.exit_code = exit_code


@dataclass(frozen=True)
class MStarSpec:
    n: int
    p_trust_l: Tuple[float, ...]
    delta_m: Optional[float]


@dataclass(frozen=True)
class BoundsSpec:
    m_bar: float
    n_values: Tuple[int, ...]
    beta_l: Optional[float]
    beta_m: Optional[float]


@dataclass(frozen=True)
class ExperimentSpec:
    scenario: ScenarioConfig
    trials: Optional[int]
    methods: Optional[Tuple[str, ...]]
    delta_p: float
    sweep_proportions: Optional[Tuple[float, ...]]
    mstar: Optional[MStarSpec]
    bounds: Optional[BoundsSpec]


# ---------------------------------------------------------------------------
# Spec parsing
# ---------------------------------------------------------------------------


def _as_table(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise SpecError(f"{path}: expected a table", EXIT_MALFORMED)
    return dict(value)


def _pop_req(table: dict, key: str, path: str):
    if key not in table:
        raise SpecError(f"{path}: missing required key {key!r}", EXIT_MALFORMED)
    return table.pop(key)


def _finish(table: dict, path: str) -> None:
    if table:
        raise SpecError(
            f"{path}: unknown key {sorted(table)[0]!r}", EXIT_MALFORMED)


def _as_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecError(f"{path}: expected an integer, got {value!r}",
                        EXIT_MALFORMED)
    return value


def _as_float(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(f"{path}: expected a number, got {value!r}",
                        EXIT_MALFORMED)
    return float(value)


def _as_float_list(value, path: str) -> List[float]:
    if not isinstance(value, list) or not value:
        raise SpecError(f"{path}: expected a non-empty array of numbers",
                        EXIT_MALFORMED)
    return [_as_float(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _as_int_list(value, path: str) -> List[int]:
    if not isinstance(value, list) or not value:
        raise SpecError(f"{path}: expected a non-empty array of integers",
                        EXIT_MALFORMED)
    return [_as_int(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _as_str_list(value, path: str) -> List[str]:
    if not isinstance(value, list) or not value or \
            not all(isinstance(v, str) for v in value):
        raise SpecError(f"{path}: expected a non-empty array of strings",
                        EXIT_MALFORMED)
    return list(value)


def _invariant(path: str, exc: Exception) -> SpecError:
    return SpecError(f"{path}: {exc}", EXIT_INVARIANT)


def _parse_scenario(root: dict) -> ScenarioConfig:
    sc = _as_table(_pop_req(root, "scenario", "spec"), "scenario")
    n = _as_int(_pop_req(sc, "n", "scenario"), "scenario.n")
    malicious_count = _as_int(_pop_req(sc, "malicious_count", "scenario"),
                              "scenario.malicious_count")
    seed = _as_int(_pop_req(sc, "seed", "scenario"), "scenario.seed")

    st = _as_table(_pop_req(sc, "sensor", "scenario"), "scenario.sensor")
    kwargs = {k: _as_float(_pop_req(st, k, "scenario.sensor"),
                           f"scenario.sensor.{k}")
              for k in ("p_fa_l", "p_md_l", "prior_h0", "prior_h1")}
    _finish(st, "scenario.sensor")
    try:
        sensor = SensorModel(**kwargs)
    except (DomainError, ValidityError) as e:
        raise _invariant("scenario.sensor", e)

    tt = _as_table(_pop_req(sc, "trust", "scenario"), "scenario.trust")
    alphabet = _as_float_list(_pop_req(tt, "alphabet", "scenario.trust"),
                              "scenario.trust.alphabet")
    pmf_legit = _as_float_list(_pop_req(tt, "pmf_legit", "scenario.trust"),
                               "scenario.trust.pmf_legit")
    pmf_malicious = _as_float_list(
        _pop_req(tt, "pmf_malicious", "scenario.trust"),
        "scenario.trust.pmf_malicious")
    _finish(tt, "scenario.trust")
    try:
        trust = TrustModel(alphabet=alphabet, pmf_legit=pmf_legit,
                           pmf_malicious=pmf_malicious)
    except (DomainError, ValidityError) as e:
        raise _invariant("scenario.trust", e)

    at = _as_table(_pop_req(sc, "attack", "scenario"), "scenario.attack")
    akw = {k: _as_float(_pop_req(at, k, "scenario.attack"),
                        f"scenario.attack.{k}")
           for k in ("p_f", "pre_fa", "pre_md")}
    _finish(at, "scenario.attack")
    try:
        attack = AttackModel(**akw)
    except (DomainError, ValidityError) as e:
        raise _invariant("scenario.attack", e)

    _finish(sc, "scenario")
    try:
        return ScenarioConfig(n=n, malicious_count=malicious_count,
                              sensor=sensor, trust=trust, attack=attack,
                              seed=seed)
    except (DomainError, ValidityError) as e:
        raise _invariant("scenario", e)


def parse_spec(path: str) -> ExperimentSpec:
    """Parse and strictly validate a TOML experiment spec."""
    try:
        with open(path, "rb") as f:
            doc = tomllib.load(f)
    except FileNotFoundError:
        raise SpecError(f"spec file not found: {path}", EXIT_MISSING_SPEC)
    except tomllib.TOMLDecodeError as e:
        raise SpecError(f"{path}: invalid TOML: {e}", EXIT_MALFORMED)

    root = dict(doc)
    scenario = _parse_scenario(root)

    trials = None
    methods: Optional[Tuple[str, ...]] = None
    delta_p = 0.01
    if "experiment" in root:
        et = _as_table(root.pop("experiment"), "experiment")
        trials = _as_int(_pop_req(et, "trials", "experiment"),
                         "experiment.trials")
        if trials < 1:
            raise SpecError("experiment.trials: must be >= 1", EXIT_INVARIANT)
        names = _as_str_list(_pop_req(et, "methods", "experiment"),
                             "experiment.methods")
        for name in names:
            if name not in METHOD_NAMES:
                raise SpecError(
                    f"experiment.methods: unknown method {name!r}; valid: "
                    f"{', '.join(METHOD_NAMES)}", EXIT_MALFORMED)
        methods = tuple(names)
        if "delta_p" in et:
            delta_p = _as_float(et.pop("delta_p"), "experiment.delta_p")
            if not 0.0 < delta_p <= 1.0:
                raise SpecError("experiment.delta_p: must lie in (0, 1]",
                                EXIT_INVARIANT)
        _finish(et, "experiment")

    sweep_proportions = None
    if "sweep" in root:
        st = _as_table(root.pop("sweep"), "sweep")
        props = _as_float_list(_pop_req(st, "proportions", "sweep"),
                               "sweep.proportions")
        for p in props:
            if not 0.0 <= p <= 1.0:
                raise SpecError(f"sweep.proportions: {p} outside [0, 1]",
                                EXIT_INVARIANT)
        _finish(st, "sweep")
        sweep_proportions = tuple(props)

    mstar = None
    if "mstar" in root:
        mt = _as_table(root.pop("mstar"), "mstar")
        mn = _as_int(_pop_req(mt, "n", "mstar"), "mstar.n")
        if mn < 1:
            raise SpecError("mstar.n: must be >= 1", EXIT_INVARIANT)
        ptl = _as_float_list(_pop_req(mt, "p_trust_l", "mstar"),
                             "mstar.p_trust_l")
        for p in ptl:
            if not 0.0 < p < 1.0:
                raise SpecError(f"mstar.p_trust_l: {p} outside (0, 1)",
                                EXIT_INVARIANT)
        delta_m = None
        if "delta_m" in mt:
            delta_m = _as_float(mt.pop("delta_m"), "mstar.delta_m")
            if not 0.0 < delta_m <= 1.0:
                raise SpecError("mstar.delta_m: must lie in (0, 1]",
                                EXIT_INVARIANT)
        _finish(mt, "mstar")
        mstar = MStarSpec(n=mn, p_trust_l=tuple(ptl), delta_m=delta_m)

    bounds = None
    if "bounds" in root:
        bt = _as_table(root.pop("bounds"), "bounds")
        m_bar = _as_float(_pop_req(bt, "m_bar", "bounds"), "bounds.m_bar")
        if not 0.0 <= m_bar <= 1.0:
            raise SpecError("bounds.m_bar: must lie in [0, 1]", EXIT_INVARIANT)
        n_values = _as_int_list(_pop_req(bt, "n_values", "bounds"),
                                "bounds.n_values")
        for nv in n_values:
            if nv < 1:
                raise SpecError("bounds.n_values: entries must be >= 1",
                                EXIT_INVARIANT)
        beta_l = beta_m = None
        if "beta_l" in bt:
            beta_l = _as_float(bt.pop("beta_l"), "bounds.beta_l")
        if "beta_m" in bt:
            beta_m = _as_float(bt.pop("beta_m"), "bounds.beta_m")
        _finish(bt, "bounds")
        bounds = BoundsSpec(m_bar=m_bar, n_values=tuple(n_values),
                            beta_l=beta_l, beta_m=beta_m)

    _finish(root, "spec")
    return ExperimentSpec(scenario=scenario, trials=trials, methods=methods,
                          delta_p=delta_p, sweep_proportions=sweep_proportions,
                          mstar=mstar, bounds=bounds)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _scenario_dict(cfg: ScenarioConfig) -> dict:
    return {
        "n": cfg.n,
        "malicious_count": cfg.malicious_count,
        "seed": cfg.seed,
        "sensor": {
            "p_fa_l": cfg.sensor.p_fa_l,
            "p_md_l": cfg.sensor.p_md_l,
            "prior_h0": cfg.sensor.prior_h0,
            "prior_h1": cfg.sensor.prior_h1,
        },
        "trust": {
            "alphabet": list(cfg.trust.alphabet),
            "pmf_legit": list(cfg.trust.pmf_legit),
            "pmf_malicious": list(cfg.trust.pmf_malicious),
        },
        "attack": {
            "p_f": cfg.attack.p_f,
            "pre_fa": cfg.attack.pre_fa,
            "pre_md": cfg.attack.pre_md,
        },
    }


def _write_manifest(out_dir: str, command: str, config: dict,
                    outputs: Sequence[str]) -> None:
    doc = {
        "artifact_version": __version__,
        "command": command,
        "config": config,
        "outputs": sorted(outputs),
    }
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    with open(os.path.join(out_dir, "manifest.json"), "w") as f:
        f.write(text)


def _warn_fractional(prop: float, n: int, count: int) -> None:
    if abs(prop * n - count) > 1e-9:
        print(f"warning: proportion {prop} of n={n} robots is fractional; "
              f"using {count} malicious robots", file=sys.stderr)


def _print_results(results) -> None:
    print(f"{'method':<20}{'trials':>9}{'errors':>9}{'error %':>10}"
          f"{'95% ci %':>10}")
    for r in results:
        print(f"{r.method:<20}{r.trials:>9}{r.errors:>9}"
              f"{r.error_rate * 100:>10.2f}{r.ci_halfwidth * 100:>10.2f}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _resolved_run_config(spec: ExperimentSpec, cfg: ScenarioConfig,
                         trials: int) -> dict:
    return {
        "scenario": _scenario_dict(cfg),
        "trials": trials,
        "methods": list(spec.methods),
        "delta_p": spec.delta_p,
    }


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SpecError(message, EXIT_MALFORMED)


def cmd_run(spec: ExperimentSpec, args: argparse.Namespace) -> int:
    _require(spec.trials is not None,
             "run command requires an [experiment] table")
    cfg = spec.scenario
    trials = args.trials if args.trials is not None else spec.trials
    methods = build_methods(spec.methods, cfg,
                            m_bar=cfg.malicious_count / cfg.n,
                            delta_p=spec.delta_p)
    report = run_experiment(cfg, trials, methods, threads=args.threads)

    os.makedirs(args.out, exist_ok=True)
    rows = [[r.method, r.trials, r.errors, r.error_rate, r.ci_halfwidth]
            for r in report.results]
    _write_csv(os.path.join(args.out, "run.csv"),
               ["method", "trials", "errors", "error_rate", "ci_halfwidth"],
               rows)
    _write_manifest(args.out, "run", _resolved_run_config(spec, cfg, trials),
                    ["run.csv"])

    print(f"n={cfg.n} malicious={cfg.malicious_count} "
          f"(proportion {cfg.malicious_proportion:.3f}) seed={cfg.seed} "
          f"trials={trials}")
    _print_results(report.results)
    return 0


def cmd_sweep(spec: ExperimentSpec, args: argparse.Namespace) -> int:
    _require(spec.trials is not None,
             "sweep command requires an [experiment] table")
    _require(spec.sweep_proportions is not None,
             "sweep command requires a [sweep] table")
    cfg = spec.scenario
    trials = args.trials if args.trials is not None else spec.trials
    for prop in spec.sweep_proportions:
        _warn_fractional(prop, cfg.n, resolve_malicious_count(prop, cfg.n))
    sweep = sweep_malicious_proportion(cfg, spec.sweep_proportions, trials,
                                       spec.methods, threads=args.threads,
                                       delta_p=spec.delta_p)

    os.makedirs(args.out, exist_ok=True)
    rows = []
    for prop, report in sweep:
        for r in report.results:
            rows.append([prop, r.method, r.trials, r.errors, r.error_rate,
                         r.ci_halfwidth])
    _write_csv(os.path.join(args.out, "sweep.csv"),
               ["proportion", "method", "trials", "errors", "error_rate",
                "ci_halfwidth"], rows)
    config = _resolved_run_config(spec, cfg, trials)
    config["proportions"] = list(spec.sweep_proportions)
    _write_manifest(args.out, "sweep", config, ["sweep.csv"])

    for prop, report in sweep:
        print(f"-- malicious proportion {prop:.3f} "
              f"({resolve_malicious_count(prop, cfg.n)}/{cfg.n} robots)")
        _print_results(report.results)
    return 0


def cmd_mstar(spec: ExperimentSpec, args: argparse.Namespace) -> int:
    _require(spec.mstar is not None, "mstar command requires a [mstar] table")
    ms = spec.mstar
    priors = (spec.scenario.sensor.prior_h0, spec.scenario.sensor.prior_h1)
    rows = []
    for ptl in ms.p_trust_l:
        exact = m_star_noiseless_exact(ptl, 1.0 - ptl, ms.n, priors,
                                       delta_m=ms.delta_m)
        approx = m_star_normal_approx(ptl, 1.0 - ptl, ms.n, priors,
                                      delta_m=ms.delta_m)
        rows.append([ptl, exact, approx])

    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "mstar.csv"),
               ["p_trust_l", "m_star_exact", "m_star_approx"], rows)
    config = {
        "scenario": _scenario_dict(spec.scenario),
        "mstar": {"n": ms.n, "p_trust_l": list(ms.p_trust_l),
                  "delta_m": ms.delta_m},
    }
    _write_manifest(args.out, "mstar", config, ["mstar.csv"])

    print(f"n={ms.n} priors=({priors[0]}, {priors[1]}) "
          f"p_trust_m = 1 - p_trust_l")
    print(f"{'p_trust_l':>10}{'exact':>10}{'approx':>10}")
    for ptl, exact, approx in rows:
        print(f"{ptl:>10.3f}{exact:>10.3f}{approx:>10.3f}")
    return 0


def cmd_bounds(spec: ExperimentSpec, args: argparse.Namespace) -> int:
    _require(spec.bounds is not None,
             "bounds command requires a [bounds] table")
    bs = spec.bounds
    sensor = spec.scenario.sensor
    trust = spec.scenario.trust
    rows = []
    for n in bs.n_values:
        _warn_fractional(bs.m_bar, n, resolve_malicious_count(bs.m_bar, n))
        wc = WorstCaseConfig(m_bar=bs.m_bar, n=n, delta_p=spec.delta_p)
        th = optimize_thresholds(wc, sensor, trust)
        ptl, ptm = trust_probabilities(th, trust)
        beta_l = bs.beta_l if bs.beta_l is not None else ptl / 2.0
        beta_m = bs.beta_m if bs.beta_m is not None else (ptm + 1.0) / 2.0
        bound: object = ""
        try:
            region = BoundRegion(beta_l=beta_l, beta_m=beta_m)
            bound = error_upper_bound(th, wc, region, sensor, trust)
        except (DomainError, ValidityError) as e:
            print(f"warning: no valid bound at n={n}: {e}", file=sys.stderr)
        rows.append([n, th.worst_case_error, bound])

    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "bounds.csv"),
               ["N", "exact_error", "bound"], rows)
    config = {
        "scenario": _scenario_dict(spec.scenario),
        "bounds": {"m_bar": bs.m_bar, "n_values": list(bs.n_values),
                   "beta_l": bs.beta_l, "beta_m": bs.beta_m},
        "delta_p": spec.delta_p,
    }
    _write_manifest(args.out, "bounds", config, ["bounds.csv"])

    print(f"m_bar={bs.m_bar}")
    print(f"{'N':>6}{'exact':>14}{'bound':>14}")
    for n, exact, bound in rows:
        btxt = f"{bound:>14.6g}" if bound != "" else f"{'n/a':>14}"
        print(f"{n:>6}{exact:>14.6g}{btxt}")
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trustfusion",
        description="Resilient hypothesis testing with stochastic trust values")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_experiment_flags: bool):
        p.add_argument("--spec", required=True, help="TOML experiment spec")
        p.add_argument("--out", default=".", help="output directory")
        if with_experiment_flags:
            p.add_argument("--seed", type=int, default=None,
                           help="override scenario seed")
            p.add_argument("--trials", type=int, default=None,
                           help="override trial count")
            p.add_argument("--threads", type=int, default=1,
                           help="worker threads (results are unaffected)")

    add_common(sub.add_parser("run", help="single experiment"), True)
    add_common(sub.add_parser(
        "sweep", help="experiments across malicious proportions"), True)
    add_common(sub.add_parser(
        "mstar", help="critical malicious proportion, exact vs approximation"),
        False)
    add_common(sub.add_parser(
        "bounds", help="analytic error bound vs exact worst-case error"),
        False)
    return parser


_COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "mstar": cmd_mstar,
    "bounds": cmd_bounds,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = parse_spec(args.spec)
        if getattr(args, "seed", None) is not None:
            spec = replace(spec, scenario=replace(spec.scenario, seed=args.seed))
        return _COMMANDS[args.command](spec, args)
    except SpecError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except (DomainError, ValidityError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
