"""Command line front end.

Subcommands cover the whole desk workflow: generate a synthetic plant,
clean it, train and benchmark surrogates, sweep history length, fit
forecasters, run optimization trials, explain a surrogate, price the
reagent savings, or do all of it in one ``report`` run.

Conventions shared by every subcommand:

* flags are long form only; ``--config``, ``--seed``, ``--out`` and
  ``--threads`` mean the same thing everywhere
* outputs land in ``--out`` together with a ``manifest.json`` recording
  the config hash, seed, library versions, and a sha256 per output, so
  a rerun can be checked byte for byte
* every chart (SVG, direct markup) sits next to a CSV with the numbers
* exit codes: 0 success, 1 usage error, 2 validation failure,
  3 numerical failure

kilnopt imports stay inside the command functions: ``--threads`` is
applied to the BLAS/OpenMP environment before the numeric stack loads,
which is the only moment it can take effect.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
import sys


class UsageError(Exception):
    """Bad invocation: unknown flag, missing argument, empty list."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route through UsageError
    # instead so 2 stays reserved for validation failures
    def error(self, message):
        raise UsageError(message)


def _fmt(v) -> str:
    return f"{float(v):.10g}"


def _ensure_out(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _write_text(path: str, text: str) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")
    return path


def _write_csv(path: str, header, rows) -> str:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(row)
    return path


def _load(args):
    from .config import load_config

    return load_config(args.config)


def _input_path(args, config) -> str:
    path = args.input or config.get("paths", "input")
    if not path:
        raise UsageError("no input dataset: pass --input or set [paths] input")
    if not os.path.exists(path):
        from .config import ConfigError

        raise ConfigError(f"input path does not exist: {path}")
    return path


def _dataset(args, config):
    from .csvio import load_csv

    return load_csv(_input_path(args, config))


def _seed(args, config, section: str) -> int:
    return args.seed if args.seed is not None else config.get(section, "seed")


def _manifest(args, config, command: str, seed, outputs, extra=None) -> str:
    from .manifest import write_manifest

    return write_manifest(
        args.out, command, seed, config.source_text, outputs, extra=extra
    )


# ---------------------------------------------------------------- commands


def cmd_generate(args) -> int:
    config = _load(args)
    from .csvio import write_csv
    from .synth import default_plant_spec, generate_synthetic_plant, inject_artifacts

    seed = _seed(args, config, "generate")
    duration = args.duration or config.get("generate", "duration_minutes")
    spec = default_plant_spec(seed=seed, duration_minutes=duration)
    ds = generate_synthetic_plant(spec)
    # leave realistic dirt for the preprocess stage to find
    ds, log = inject_artifacts(
        ds,
        duplicate_fraction=0.002,
        missing_fraction=0.003,
        negative_fraction=0.001,
        seed=seed + 1,
    )
    _ensure_out(args.out)
    out = os.path.join(args.out, "dataset.csv")
    write_csv(ds, out)
    _manifest(
        args,
        config,
        "generate",
        seed,
        [out],
        extra={
            "duration_minutes": duration,
            "rows": ds.n_rows,
            "injected": {
                "duplicates": len(log.duplicate_rows),
                "missing": len(log.missing_rows),
                "negatives": len(log.negative_rows),
            },
        },
    )
    print(f"generated {ds.n_rows} rows -> {out}")
    return 0


def cmd_preprocess(args) -> int:
    config = _load(args)
    from .csvio import write_csv
    from .preprocess import default_rules, run_pipeline

    ds = _dataset(args, config)
    clean, report = run_pipeline(
        ds,
        default_rules(),
        lo=config.get("preprocess", "percentile_lo"),
        hi=config.get("preprocess", "percentile_hi"),
        threshold=config.get("preprocess", "corr_threshold"),
        target_channel=config.get("preprocess", "target_channel"),
    )
    _ensure_out(args.out)
    out_csv = os.path.join(args.out, "cleaned.csv")
    write_csv(clean, out_csv)
    out_txt = _write_text(os.path.join(args.out, "report.txt"), str(report))
    _manifest(args, config, "preprocess", None, [out_csv, out_txt])
    print(str(report))
    print(f"cleaned dataset -> {out_csv}")
    return 0


def cmd_train(args) -> int:
    config = _load(args)
    from .config import regressor_spec_from
    from .metrics import MetricReport
    from .models import fit
    from .models.persist import save_model
    from .temporal import build_eph_matrix, split_design, time_boundary

    ds = _dataset(args, config)
    channel = args.channel or config.get("preprocess", "target_channel")
    tau = args.tau if args.tau is not None else config.get("surrogate", "tau")
    seed = _seed(args, config, "surrogate")
    spec = regressor_spec_from(config, family=args.family, seed=seed)

    design = build_eph_matrix(ds, channel, tau)
    boundary = time_boundary(ds, config.get("surrogate", "train_fraction"))
    train, test = split_design(design, boundary)
    model = fit(spec, train.X, train.y, schema=design.feature_names)
    report = MetricReport.from_predictions(test.y, model.predict(test.X))

    _ensure_out(args.out)
    out_model = os.path.join(args.out, "model.json")
    save_model(
        model,
        out_model,
        spec_fields={
            "family": spec.family.name,
            "seed": spec.seed,
            "channel": channel,
            "tau": tau,
        },
    )
    out_txt = _write_text(
        os.path.join(args.out, "metrics.txt"),
        f"{spec.family.name} tau={tau} channel={channel}\n"
        f"train n={train.n_samples}  test n={test.n_samples}\n{report}",
    )
    _manifest(args, config, "train", seed, [out_model, out_txt])
    print(f"{spec.family.name} on {channel} (tau={tau}): {report}")
    return 0


def cmd_benchmark(args) -> int:
    config = _load(args)
    from .config import regressor_spec_from
    from .models.validate import benchmark

    raw = args.families if args.families is not None else config.get("benchmark", "families")
    families = [f for f in raw.split(",") if f.strip()]
    if not families:
        raise UsageError("benchmark needs at least one model family (--families)")
    ds = _dataset(args, config)
    channel = args.channel or config.get("preprocess", "target_channel")
    seed = args.seed if args.seed is not None else 0
    specs = [regressor_spec_from(config, family=f.strip(), seed=seed) for f in families]
    result = benchmark(
        specs,
        ds,
        channel,
        n_seeds=args.seeds or config.get("benchmark", "n_seeds"),
        train_fraction=config.get("benchmark", "train_fraction"),
    )
    _ensure_out(args.out)
    out_txt = _write_text(os.path.join(args.out, "benchmark.txt"), result.table())
    out_csv = _write_csv(
        os.path.join(args.out, "benchmark.csv"),
        ["model", "mape_mean", "mape_std", "mae_mean", "mae_std", "r2_mean", "r2_std"],
        [
            [e.label] + [_fmt(v) for v in (e.mape_mean, e.mape_std, e.mae_mean, e.mae_std, e.r2_mean, e.r2_std)]
            for e in result.entries
        ],
    )
    _manifest(args, config, "benchmark", seed, [out_txt, out_csv], extra={"winner": result.winner})
    print(result.table())
    return 0


def cmd_sweep_tau(args) -> int:
    config = _load(args)
    from .config import regressor_spec_from
    from .svgplot import line_chart, write_svg
    from .temporal import sweep_tau

    raw = args.taus if args.taus is not None else "0,5,10,15,20,25"
    taus = [int(t) for t in raw.split(",") if t.strip()]
    if not taus:
        raise UsageError("sweep-tau needs at least one history length (--taus)")
    ds = _dataset(args, config)
    channel = args.channel or config.get("preprocess", "target_channel")
    seed = _seed(args, config, "surrogate")
    spec = regressor_spec_from(config, family=args.family, seed=seed)
    points = sweep_tau(ds, channel, taus, spec, config.get("surrogate", "train_fraction"))

    _ensure_out(args.out)
    out_csv = _write_csv(
        os.path.join(args.out, "sweep_tau.csv"),
        ["tau", "n_features", "n_train", "n_test", "mape", "mae", "r2"],
        [
            [p.tau, p.n_features, p.n_train, p.n_test, _fmt(p.report.mape), _fmt(p.report.mae), _fmt(p.report.r2)]
            for p in points
        ],
    )
    svg = line_chart(
        [(f"{channel} test MAPE", [p.tau for p in points], [p.report.mape for p in points])],
        f"history length sweep ({spec.family.name})",
        "history length tau (minutes)",
        "MAPE %",
    )
    out_svg = os.path.join(args.out, "sweep_tau.svg")
    write_svg(out_svg, svg)
    _manifest(args, config, "sweep-tau", seed, [out_csv, out_svg])
    for p in points:
        print(f"tau={p.tau:<3d} features={p.n_features:<4d} {p.report}")
    return 0


def cmd_forecast(args) -> int:
    config = _load(args)
    from .config import forecast_config_from
    from .forecast import (
        evaluate_horizon,
        fit_multi_step,
        fit_single_step,
        forecast_batch,
        make_ar_samples,
        sample_events,
        split_series,
        uncertainty_bands,
        with_bands,
    )
    from .svgplot import line_chart, write_svg

    overrides = {}
    if args.lookback is not None:
        overrides["lookback"] = args.lookback
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    if args.events is not None:
        overrides["n_events"] = args.events
    fc = forecast_config_from(config, **overrides)
    seed = _seed(args, config, "forecast")
    fc = dataclasses.replace(fc, regressor=fc.regressor.reseeded(seed))

    ds = _dataset(args, config)
    channel = args.channel or config.get("preprocess", "target_channel")
    split = split_series(ds, channel, fc)
    train_samples = make_ar_samples(split.train_segments, fc.lookback, fc.horizon)

    single = fit_single_step(fc, train_samples)
    lo, hi = uncertainty_bands(single, train_samples, fc.level)
    single = with_bands(single, lo, hi)
    multi = fit_multi_step(fc, train_samples)

    curve_s = evaluate_horizon(single, split.test_segments, fc.n_events, seed)
    curve_m = evaluate_horizon(multi, split.test_segments, fc.n_events, seed)

    _ensure_out(args.out)
    steps = list(range(1, fc.horizon + 1))
    out_curve = _write_csv(
        os.path.join(args.out, "horizon_curve.csv"),
        ["step", "recursive_ape", "direct_ape"],
        [
            [k, _fmt(curve_s.per_step_ape[k - 1]), _fmt(curve_m.per_step_ape[k - 1])]
            for k in steps
        ],
    )
    svg = line_chart(
        [
            ("recursive", steps, curve_s.per_step_ape),
            ("direct multi-step", steps, curve_m.per_step_ape),
        ],
        f"{channel} forecast error by step ahead",
        "steps ahead (minutes)",
        "mean APE %",
    )
    out_curve_svg = os.path.join(args.out, "horizon_curve.svg")
    write_svg(out_curve_svg, svg)

    # one held-out example trajectory with the recursive interval overlay
    Xe, Ye = sample_events(split.test_segments, fc.lookback, fc.horizon, 1, seed)
    traj_s = forecast_batch(single, Xe)[0]
    traj_m = forecast_batch(multi, Xe)[0]
    out_example = _write_csv(
        os.path.join(args.out, "example_forecast.csv"),
        ["step", "truth", "recursive", "direct", "band_lo", "band_hi"],
        [
            [
                k,
                _fmt(Ye[0][k - 1]),
                _fmt(traj_s[k - 1]),
                _fmt(traj_m[k - 1]),
                _fmt(traj_s[k - 1] + single.band_lo[k - 1]),
                _fmt(traj_s[k - 1] + single.band_hi[k - 1]),
            ]
            for k in steps
        ],
    )
    svg = line_chart(
        [
            ("observed", steps, Ye[0]),
            ("recursive", steps, traj_s),
            ("direct multi-step", steps, traj_m),
        ],
        f"{channel} example forecast",
        "steps ahead (minutes)",
        f"{channel}",
        band=(steps, traj_s + single.band_lo, traj_s + single.band_hi),
    )
    out_example_svg = os.path.join(args.out, "example_forecast.svg")
    write_svg(out_example_svg, svg)

    _manifest(
        args,
        config,
        "forecast",
        seed,
        [out_curve, out_curve_svg, out_example, out_example_svg],
        extra={
            "channel": channel,
            "effective_horizon_recursive": curve_s.effective_horizon,
            "effective_horizon_direct": curve_m.effective_horizon,
            "n_events": curve_s.n_events,
        },
    )
    print(
        f"{channel}: effective horizon recursive={curve_s.effective_horizon} "
        f"direct={curve_m.effective_horizon} over {curve_s.n_events} events"
    )
    return 0


def cmd_optimize(args) -> int:
    config = _load(args)
    from .config import controller_config_from
    from .controller import Scenario, run_trials

    ds = _dataset(args, config)
    seed = _seed(args, config, "controller")
    cc = controller_config_from(config, seed=seed)
    scenario = Scenario[args.scenario]
    n_trials = args.trials or config.get("controller", "n_trials")
    summary = run_trials(
        ds,
        cc,
        scenario,
        n_trials=n_trials,
        seed=seed,
        train_fraction=config.get("controller", "train_fraction"),
    )

    _ensure_out(args.out)
    rows = []
    for k, r in enumerate(summary.trials):
        rows.append(
            [
                k,
                _fmt(r.initial_nox_observed),
                _fmt(r.nox_before),
                _fmt(r.nox_after),
                _fmt(r.reduction_pct),
                r.kpi.status.name,
                _fmt(r.kpi.flow_change_pct),
                _fmt(r.kpi.fcao_predicted),
                _fmt(r.similarity_score),
            ]
        )
    out_csv = _write_csv(
        os.path.join(args.out, "trials.csv"),
        [
            "trial",
            "observed_nox",
            "predicted_before",
            "predicted_after",
            "reduction_pct",
            "kpi_status",
            "flow_change_pct",
            "fcao_predicted",
            "similarity_pct",
        ],
        rows,
    )
    out_txt = _write_text(os.path.join(args.out, "summary.txt"), str(summary))
    _manifest(
        args,
        config,
        "optimize",
        seed,
        [out_csv, out_txt],
        extra={
            "scenario": scenario.value,
            "mean_reduction_pct": summary.mean_reduction_pct,
            "kpi_failure_rate": summary.kpi_failure_rate,
        },
    )
    print(str(summary))
    return 0


def cmd_explain(args) -> int:
    config = _load(args)
    from .controller import DV_COLUMNS, default_nox_surrogate_spec
    from .explain import directional_impact
    from .models import fit
    from .svgplot import line_chart, write_svg
    import numpy as np

    ds = _dataset(args, config)
    channel = args.channel or config.get("preprocess", "target_channel")
    seed = args.seed if args.seed is not None else 0

    names = list(ds.param_names)
    missing = [c for c in DV_COLUMNS if c not in names]
    if missing:
        from .dataset import DatasetError

        raise DatasetError(f"dataset lacks decision parameters: {', '.join(missing)}")
    idx = [names.index(c) for c in DV_COLUMNS]
    ok = ds.row_all_valid() & ds.emission_valid[channel]
    X = ds.params[np.flatnonzero(ok)][:, idx]
    y = ds.emissions[channel][ok]
    model = fit(default_nox_surrogate_spec(seed), X, y, schema=DV_COLUMNS)

    impact = directional_impact(
        model,
        X,
        n_samples=args.samples,
        n_background=args.background,
        seed=seed,
        feature_names=DV_COLUMNS,
    )
    mean_abs = np.abs(impact.phi_matrix).mean(axis=0)

    _ensure_out(args.out)
    out_signs = _write_csv(
        os.path.join(args.out, "impact.csv"),
        ["feature", "sign", "pearson_r", "mean_abs_phi"],
        [
            [DV_COLUMNS[j], int(impact.signs[j]), _fmt(impact.pearson_r[j]), _fmt(mean_abs[j])]
            for j in range(len(DV_COLUMNS))
        ],
    )
    out_phi = _write_csv(
        os.path.join(args.out, "attributions.csv"),
        ["sample"] + [c for c in DV_COLUMNS],
        [
            [i] + [_fmt(v) for v in impact.phi_matrix[i]]
            for i in range(impact.phi_matrix.shape[0])
        ],
    )
    svg = line_chart(
        [("mean |attribution|", list(range(len(DV_COLUMNS))), mean_abs)],
        f"mean absolute attribution per decision parameter ({channel})",
        "parameter index (see impact.csv)",
        "PPM",
    )
    out_svg = os.path.join(args.out, "impact.svg")
    write_svg(out_svg, svg)
    _manifest(args, config, "explain", seed, [out_signs, out_phi, out_svg])
    for j, name in enumerate(DV_COLUMNS):
        arrow = {1: "+", -1: "-", 0: "0"}[int(impact.signs[j])]
        print(f"{arrow} {name:<28s} r={impact.pearson_r[j]:+.3f}  mean|phi|={mean_abs[j]:.2f}")
    return 0


def cmd_econ(args) -> int:
    config = _load(args)
    from .config import econ_config_from
    from .econ import annual_summary

    ds = _dataset(args, config)
    summary = annual_summary(ds, econ_config_from(config))

    _ensure_out(args.out)
    out_txt = _write_text(os.path.join(args.out, "econ.txt"), str(summary))
    out_csv = _write_csv(
        os.path.join(args.out, "econ.csv"),
        ["field", "value"],
        [
            [f.name, _fmt(getattr(summary, f.name))]
            for f in dataclasses.fields(summary)
        ],
    )
    _manifest(args, config, "econ", None, [out_txt, out_csv])
    print(str(summary))
    return 0


def cmd_report(args) -> int:
    """Full pipeline into one directory: generate (unless an input is
    given), preprocess, benchmark, sweep-tau, forecast, optimize, econ,
    then a cover page tying the artifacts together."""
    config = _load(args)
    root = _ensure_out(args.out)

    def sub(name):
        ns = argparse.Namespace(**vars(args))
        ns.out = os.path.join(root, name)
        return ns

    gen = sub("dataset")
    if args.input or config.get("paths", "input"):
        raw_path = _input_path(args, config)
    else:
        rc = cmd_generate(gen)
        if rc != 0:
            return rc
        raw_path = os.path.join(gen.out, "dataset.csv")

    pre = sub("preprocess")
    pre.input = raw_path
    rc = cmd_preprocess(pre)
    if rc != 0:
        return rc
    clean_path = os.path.join(pre.out, "cleaned.csv")

    stages = [
        ("benchmark", cmd_benchmark),
        ("sweep_tau", cmd_sweep_tau),
        ("forecast", cmd_forecast),
        ("optimize", cmd_optimize),
        ("explain", cmd_explain),
        ("econ", cmd_econ),
    ]
    for name, fn in stages:
        ns = sub(name)
        ns.input = clean_path
        rc = fn(ns)
        if rc != 0:
            return rc

    stage_names = ["dataset", "preprocess"] + [name for name, _ in stages]
    lines = ["pipeline artifacts", "=" * 18, ""]
    for name in stage_names:
        stage_dir = os.path.join(root, name)
        if not os.path.isdir(stage_dir):
            continue
        files = sorted(
            f for f in os.listdir(stage_dir) if os.path.isfile(os.path.join(stage_dir, f))
        )
        lines.append(f"{name}/")
        for f in files:
            lines.append(f"  {f}")
    out_txt = _write_text(os.path.join(root, "report.txt"), "\n".join(lines))
    _manifest(args, config, "report", args.seed, [out_txt])
    print(f"report written under {root}")
    return 0


# ---------------------------------------------------------------- parser


def _add_common(p: argparse.ArgumentParser, with_input: bool = True):
    p.add_argument("--config", default=None, help="INI config file")
    p.add_argument("--seed", type=int, default=None, help="override the stage seed")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument(
        "--threads",
        type=int,
        default=None,
        help="cap math library threads (default: all cores)",
    )
    if with_input:
        p.add_argument("--input", default=None, help="input dataset CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kilnopt", description=__doc__.split("\n\n")[0])
    subs = parser.add_subparsers(dest="command", metavar="command")

    p = subs.add_parser("generate", help="write a seeded synthetic plant dataset")
    _add_common(p, with_input=False)
    p.add_argument("--duration", type=int, default=None, help="minutes of operation")
    p.set_defaults(fn=cmd_generate)

    p = subs.add_parser("preprocess", help="clean a raw dataset")
    _add_common(p)
    p.set_defaults(fn=cmd_preprocess)

    p = subs.add_parser("train", help="fit one emission surrogate")
    _add_common(p)
    p.add_argument("--channel", default=None, help="emission channel (default from config)")
    p.add_argument("--family", default=None, help="model family")
    p.add_argument("--tau", type=int, default=None, help="history length in minutes")
    p.set_defaults(fn=cmd_train)

    p = subs.add_parser("benchmark", help="rank model families on one split")
    _add_common(p)
    p.add_argument("--channel", default=None)
    p.add_argument("--families", default=None, help="comma-separated model families")
    p.add_argument("--seeds", type=int, default=None, help="refit count")
    p.set_defaults(fn=cmd_benchmark)

    p = subs.add_parser("sweep-tau", help="test error versus history length")
    _add_common(p)
    p.add_argument("--channel", default=None)
    p.add_argument("--family", default=None)
    p.add_argument("--taus", default=None, help="comma-separated history lengths")
    p.set_defaults(fn=cmd_sweep_tau)

    p = subs.add_parser("forecast", help="fit and score recursive and direct forecasters")
    _add_common(p)
    p.add_argument("--channel", default=None)
    p.add_argument("--lookback", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--events", type=int, default=None, help="held-out forecast events")
    p.set_defaults(fn=cmd_forecast)

    p = subs.add_parser("optimize", help="batch of setpoint optimization trials")
    _add_common(p)
    p.add_argument("--scenario", choices=["NORMAL", "STRESS"], default="NORMAL")
    p.add_argument("--trials", type=int, default=None)
    p.set_defaults(fn=cmd_optimize)

    p = subs.add_parser("explain", help="attribution signs for the decision parameters")
    _add_common(p)
    p.add_argument("--channel", default=None)
    p.add_argument("--samples", type=int, default=200, help="rows to explain")
    p.add_argument("--background", type=int, default=256, help="background rows")
    p.set_defaults(fn=cmd_explain)

    p = subs.add_parser("econ", help="annualized reagent cost of the measured NOx")
    _add_common(p)
    p.set_defaults(fn=cmd_econ)

    p = subs.add_parser("report", help="full pipeline into one directory")
    _add_common(p)
    p.add_argument("--duration", type=int, default=None, help="minutes when generating")
    p.add_argument("--channel", default=None)
    p.add_argument("--family", default=None)
    p.add_argument("--families", default=None)
    p.add_argument("--seeds", type=int, default=None)
    p.add_argument("--taus", default=None)
    p.add_argument("--lookback", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--events", type=int, default=None)
    p.add_argument("--scenario", choices=["NORMAL", "STRESS"], default="NORMAL")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--background", type=int, default=256)
    p.set_defaults(fn=cmd_report)

    return parser


def _apply_threads(threads) -> None:
    if threads is None:
        return
    if threads < 1:
        raise UsageError("--threads must be a positive integer")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(threads)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) is None:
            parser.print_usage(sys.stderr)
            return 1
        _apply_threads(args.threads)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        import numpy as np

        if isinstance(exc, np.linalg.LinAlgError):
            print(f"numerical failure: {exc}", file=sys.stderr)
            return 3
        print(f"validation failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
