"""Command-line interface.

Verbs: ``fit`` (CSV -> model file), ``advise`` (full report), ``irf``
(response series for plotting), ``effect-length``, ``whatif``, ``serve``
(HTTP service).  Exit codes: 0 success, 1 computation/data failure,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import report
from .advice import RunConfig, build_advice_report
from .dataset import POLARITIES, load_ema_csv
from .errors import ConfigError, VarpulseError
from .model import check_stability, fit_var, load_model, save_model

PROG = "varpulse"


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("analysis options")
    g.add_argument("--horizon", type=_positive_int, default=20, metavar="K",
                   help="number of future steps to simulate (default 20)")
    g.add_argument("--bootstrap", dest="bootstrap", action="store_true", default=None,
                   help="force bootstrap confidence bands on")
    g.add_argument("--no-bootstrap", dest="bootstrap", action="store_false",
                   help="force bootstrap confidence bands off")
    g.add_argument("--iterations", type=_positive_int, default=200, metavar="N",
                   help="bootstrap resamples (default 200)")
    g.add_argument("--confidence", type=float, default=0.95, metavar="C",
                   help="bootstrap confidence level (default 0.95)")
    g.add_argument("--seed", type=int, default=0, help="bootstrap RNG seed (default 0)")
    g.add_argument("--workers", type=_positive_int, default=1, metavar="W",
                   help="bootstrap worker threads (default 1)")
    g.add_argument("--theta", type=float, default=0.0,
                   help="minimum |net effect| for what-if suggestions (default 0)")
    g.add_argument("--window", type=float, default=1000.0,
                   help="largest admissible |required percent| (default 1000)")
    g.add_argument("--percent", type=float, default=10.0,
                   help="desired change of the target, in percent (default 10)")
    g.add_argument("--interval-minutes", type=float, default=None, metavar="MIN",
                   help="override the model's measurement interval")


def _config_from(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        horizon=args.horizon,
        bootstrap=args.bootstrap,
        iterations=args.iterations,
        confidence=args.confidence,
        theta=args.theta,
        window=args.window,
        seed=args.seed,
        workers=args.workers,
        percent=args.percent,
        interval_minutes=args.interval_minutes,
    )


def _resolve(model, name: str) -> int:
    return model.index_of(name)


def _write_output(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _parse_polarity(pairs: list[str]) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name or value not in POLARITIES:
            raise ConfigError(
                f"--polarity expects NAME=positive or NAME=negative, got {pair!r}"
            )
        mapping[name] = value
    return mapping


# ------------------------------------------------------------- commands


def cmd_fit(args: argparse.Namespace) -> int:
    data = load_ema_csv(
        args.input,
        interval_minutes=args.interval_minutes,
        polarity_map=_parse_polarity(args.polarity),
        exogenous=args.exogenous,
    )
    model = fit_var(data, lags=args.lags)
    save_model(model, args.output)
    stability = check_stability(model)
    label = "stable" if stability.stable else "UNSTABLE"
    print(f"saved model to {args.output}")
    print(
        f"{len(model.variables)} variables, {model.lags} lag(s), "
        f"{data.n_obs} observations; {label} "
        f"(spectral radius {stability.spectral_radius:.6f})"
    )
    return 0


def cmd_advise(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    doc = report.advice_document(build_advice_report(model, _config_from(args)))
    if args.format == "text":
        _write_output(report.render_advice_text(doc), args.output)
    else:
        _write_output(report.dumps_canonical(doc), args.output)
    return 0


def cmd_irf(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    config = _config_from(args)
    ordering = None
    if args.ordering:
        names = [n.strip() for n in args.ordering.split(",")]
        ordering = tuple(_resolve(model, n) for n in names)
    if args.grid:
        doc = report.irf_grid_document(model, config, args.orthogonalized, ordering)
    else:
        doc = report.irf_document(
            model,
            _resolve(model, args.impulse),
            _resolve(model, args.response),
            config,
            args.orthogonalized,
            ordering,
        )
    if args.format == "csv":
        _write_output(report.plot_records(doc), args.output)
    else:
        _write_output(report.dumps_canonical(doc), args.output)
    return 0


def cmd_effect_length(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    doc = report.effect_length_document(
        model,
        _resolve(model, args.impulse),
        _resolve(model, args.response),
        _config_from(args),
    )
    _write_output(report.dumps_canonical(doc), args.output)
    return 0


def cmd_whatif(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    doc = report.whatif_document(model, _resolve(model, args.target), _config_from(args))
    if args.format == "text":
        _write_output(report.render_whatif_text(doc), args.output)
    else:
        _write_output(report.dumps_canonical(doc), args.output)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    model = load_model(args.model) if args.model else None
    app = create_app(model=model, config=_config_from(args), ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# -------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Personalized advice from vector-autoregressive diary models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a VAR model to a diary CSV")
    p.add_argument("--input", required=True, help="CSV file (header row, one row per prompt)")
    p.add_argument("--output", required=True, help="where to write the model JSON")
    p.add_argument("--lags", type=_positive_int, required=True, help="VAR order (>= 1)")
    p.add_argument("--interval-minutes", type=float, required=True, metavar="MIN",
                   help="minutes between consecutive rows")
    p.add_argument("--polarity", action="append", default=[], metavar="NAME=POL",
                   help="mark a variable positive/negative (repeatable)")
    p.add_argument("--exogenous", action="append", default=[], metavar="NAME",
                   help="treat a column as exogenous input (repeatable)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("advise", help="full advice report for a fitted model")
    p.add_argument("--model", required=True, help="model JSON from `fit`")
    p.add_argument("--output", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    _add_run_flags(p)
    p.set_defaults(func=cmd_advise)

    p = sub.add_parser("irf", help="impulse response series for plotting")
    p.add_argument("--model", required=True)
    p.add_argument("--impulse", help="shocked variable name")
    p.add_argument("--response", help="responding variable name")
    p.add_argument("--grid", action="store_true", help="emit every impulse/response pair")
    p.add_argument("--orthogonalized", action="store_true",
                   help="use an orthogonalized (Cholesky) initial shock")
    p.add_argument("--ordering", default=None, metavar="A,B,...",
                   help="variable ordering for --orthogonalized")
    p.add_argument("--output", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_run_flags(p)
    p.set_defaults(func=cmd_irf)

    p = sub.add_parser("effect-length", help="how long a shock keeps acting")
    p.add_argument("--model", required=True)
    p.add_argument("--impulse", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--output", default=None)
    _add_run_flags(p)
    p.set_defaults(func=cmd_effect_length)

    p = sub.add_parser("whatif", help="percent changes needed to move a target")
    p.add_argument("--model", required=True)
    p.add_argument("--target", required=True, help="variable to move")
    p.add_argument("--output", default=None)
    p.add_argument("--format", choices=("json", "text"), default="json")
    _add_run_flags(p)
    p.set_defaults(func=cmd_whatif)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--model", default=None, help="model JSON to preload")
    p.add_argument("--ui", default=None, help="static directory to serve at /")
    _add_run_flags(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "irf" and not args.grid and not (args.impulse and args.response):
        parser.error("irf needs --impulse and --response (or --grid)")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"{PROG}: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"{PROG}: {exc.args[0]}", file=sys.stderr)
        return 2
    except VarpulseError as exc:
        print(f"{PROG}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"{PROG}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
