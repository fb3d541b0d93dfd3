"""Command-line entry point: ``pillaicert {search,bounds,reduce,cf,certify}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .pipeline import (
    EXIT_BAD_CONFIG,
    EXIT_ERROR,
    FORMATS,
    STAGES,
    ConfigError,
    PipelineConfig,
    emit,
    execute,
)
from .search import IndexConvention, SearchWindow

log = logging.getLogger("pillaicert")

COMMANDS = {
    "search": ("search",),
    "cf": ("cf",),
    "bounds": ("bounds",),
    "reduce": ("reduce",),
    "certify": STAGES,
}

CONFIG_KEYS = {"precision_bits", "m_min", "m_max", "n_min", "n_max", "convention", "format", "workers", "plot_dir"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=int, help="starting working precision (64..4096, default 192)")
    common.add_argument("--m-max", type=int, help="largest Padovan index searched (default 189)")
    common.add_argument("--n-max", type=int, help="largest Lucas index searched (default 300)")
    common.add_argument("--convention", help='index convention such as "m>=4,n>=0"')
    common.add_argument("--format", choices=FORMATS, help="output format (default json)")
    common.add_argument("--out", type=Path, help="write the report here instead of stdout")
    common.add_argument("--config", type=Path, help="JSON file with default settings; flags override it")
    common.add_argument("--plot-dir", type=Path, help="write PNG figures of the reduction step here")
    common.add_argument("--workers", type=int, help="processes used for the large reduction grids")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="pillaicert", description="Recompute and check the Padovan/Lucas Pillai certificate.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "search": "enumerate P_m - L_n and compare with the published set",
        "cf": "continued fractions and the chosen convergent",
        "bounds": "linear-forms-in-logarithms bound chain",
        "reduce": "reduction campaigns",
        "certify": "full pipeline",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def load_config_file(path: Path) -> dict:
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    return data


def resolve(args: argparse.Namespace) -> tuple[PipelineConfig, Path | None]:
    settings = load_config_file(args.config) if args.config else {}
    for key in ("precision_bits", "m_max", "n_max", "convention", "format", "workers", "plot_dir"):
        val = getattr(args, key)
        if val is not None:
            settings[key] = val
    defaults = SearchWindow()
    try:
        window = SearchWindow(
            int(settings.get("m_min", defaults.m_min)),
            int(settings.get("m_max", defaults.m_max)),
            int(settings.get("n_min", defaults.n_min)),
            int(settings.get("n_max", defaults.n_max)),
        )
        convention = IndexConvention.parse(settings["convention"]) if "convention" in settings else IndexConvention()
        config = PipelineConfig(
            precision_bits=int(settings.get("precision_bits", 192)),
            window=window,
            convention=convention,
            output_format=settings.get("format", "json"),
            stages=COMMANDS[args.command],
            workers=int(settings.get("workers", 1)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    plot_dir = settings.get("plot_dir")
    return config, Path(plot_dir) if plot_dir else None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        config, plot_dir = resolve(args)
    except ConfigError as exc:
        print(f"pillaicert: bad configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG

    try:
        cert, run = execute(config)
    except Exception as exc:  # anything escaping the stage guards is a runtime failure
        print(f"pillaicert: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    payload = emit(cert, config.output_format)
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_bytes(payload)
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(payload.decode())

    if plot_dir is not None:
        if run.replay_red is None:
            log.warning("no reduction results to plot; run reduce or certify")
        else:
            from .plotting import write_figures

            for path in write_figures(run.replay_red, plot_dir):
                log.info("wrote %s", path)

    log.info("verdict: %s", cert.verdict)
    return cert.exit_code


if __name__ == "__main__":
    sys.exit(main())
