import argparse
import json
import logging
import math
import sys
from typing import Dict, List, Optional

from colorama import Fore, Style, init

from src.analysis.backends import make_backend
from src.analysis.closed_form import FEATURE_NAMES, CoefficientStore, eval_closed_form
from src.analysis.fitting import SweepSample, cross_validate, default_holdout_points
from src.analysis.metrics import (
    MarginConfig,
    measure_sneak,
    noise_margin_array,
    noise_margin_device,
    resolve_margin_load,
)
from src.analysis.sensitivity import sensitivity_ranking
from src.config.run_config import Backend, RunConfig, ValidationMode, load_run_config
from src.config.sim_config import LOG_DIR, settings
from src.crossbar.netlist import export_branch_list, export_spice
from src.crossbar.topology import MeasurementMode, build_crossbar
from src.database.repository import Repository
from src.pipeline.orchestrator import benchmark_runtime, run_sweep, validate, validation_frame
from src.solver.dc_solver import dump_node_voltages, solve_dc
from src.utils.dataset_io import DatasetInfo, dataset_to_csv, read_dataset, read_dataset_info, samples_from_dataset, write_dataset
from src.utils.errors import ConfigError, SneakPathError, ValidationGateError

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
PUBLISHED_TOLERANCE_PCT = 0.3

logger = logging.getLogger(__name__)

# Initialize colorama for cross-platform colored terminal output
init()


def configure_logging(level: int) -> None:
    """Console logs on stdout at the chosen level; the log file always records INFO"""
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stdout, force=True)
    root = logging.getLogger()
    root.handlers[0].setLevel(level)
    try:
        LOG_DIR.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(LOG_DIR / "sneakpath.log")
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        file_handler.setLevel(logging.INFO)
        root.addHandler(file_handler)
    except OSError as e:
        logger.warning(f"File logging disabled: {str(e)}")
    root.setLevel(min(level, logging.INFO))


def print_colored(text, color=Fore.WHITE, end="\n"):
    """Print text with specified color"""
    print(f"{color}{text}{Style.RESET_ALL}", end=end)
    sys.stdout.flush()


def _fmt(value: float, spec: str = ".4g") -> str:
    return "nan" if value is None or (isinstance(value, float) and math.isnan(value)) else format(value, spec)


def _overrides(args) -> Dict[str, object]:
    pairs = {
        "array.size": getattr(args, "size", None),
        "array.metal": getattr(args, "metal", None),
        "array.pattern": getattr(args, "pattern", None),
        "array.strategy": getattr(args, "strategy", None),
        "array.v_dd": getattr(args, "v_dd", None),
        "array.r_load": getattr(args, "r_load", None),
        "array.measurement_mode": getattr(args, "measurement_mode", None),
        "device.k_on": getattr(args, "k_on", None),
        "device.k_off": getattr(args, "k_off", None),
        "backend": getattr(args, "backend", None),
        "workers": getattr(args, "workers", None),
        "output.csv": getattr(args, "out", None),
        "output.coefficients": getattr(args, "coefficients", None),
        "validation.mode": getattr(args, "mode", None),
        "validation.gate_pct": getattr(args, "gate", None),
    }
    if getattr(args, "store", False):
        pairs["output.store"] = True
    if getattr(args, "with_margin", False):
        pairs["sweep.with_margin"] = True
    if getattr(args, "no_runtime", False):
        pairs["output.record_runtime"] = False
    if getattr(args, "sizes", None):
        pairs["sweep.sizes"] = args.sizes
    if getattr(args, "k_on_values", None):
        pairs["sweep.k_on_values"] = args.k_on_values
    if getattr(args, "v_dd_values", None):
        pairs["sweep.v_dd_values"] = args.v_dd_values
    for name in ("metals", "patterns", "strategies"):
        if getattr(args, name, None):
            pairs[f"sweep.{name}"] = getattr(args, name)
    return pairs


def _store(config: RunConfig) -> Optional[Repository]:
    return Repository(config.output.database_url) if config.output.store else None


def cmd_solve(config: RunConfig, args) -> int:
    spec = config.crossbar_spec()
    netlist = build_crossbar(spec)
    result = solve_dc(netlist, config.solver.to_options())
    print_colored(f"{spec.n}x{spec.n} {spec.pattern.kind.value} {spec.strategy.value} {spec.metal.value}, v_dd={spec.v_dd:g} V", Fore.CYAN)
    print(f"nodes={len(netlist.nodes)} branches={len(netlist.branches)} iterations={result.iterations} max_kcl_residual={result.max_kcl_residual:.3e} A")
    print(f"source current   {result.source_current:.9g} A")
    print(f"target current   {result.current(netlist.target_branch):.9g} A")
    print(f"load current     {result.current(netlist.load_branch):.9g} A")
    print(f"sense voltage    {result.voltage(netlist.sense_node):.9g} V")
    for mode in MeasurementMode:
        print(f"sneak ({mode.value}) {measure_sneak(netlist, result, mode):.9g} A")
    if args.dump:
        print(dump_node_voltages(result))
    return 0


def _sweep_mode(config: RunConfig, args) -> MeasurementMode:
    """An explicit --measurement-mode wins; otherwise datasets carry the quantity the closed form models"""
    return MeasurementMode(args.measurement_mode) if args.measurement_mode else config.model_measurement_mode


def cmd_sweep(config: RunConfig, args) -> int:
    mode = _sweep_mode(config, args)
    frame = run_sweep(config, mode)
    if config.output.csv:
        write_dataset(frame, config.output.csv, DatasetInfo(measurement_mode=mode, backend=config.backend.value))
        print_colored(f"✓ {len(frame)} rows written to {config.output.csv}", Fore.GREEN)
    else:
        sys.stdout.write(dataset_to_csv(frame))
    repository = _store(config)
    if repository:
        run = repository.save_sweep(frame, config.backend.value, config.model_dump(mode="json"))
        repository.close()
        print_colored(f"✓ stored as run {run.id}", Fore.GREEN)
    return 0


def _simulate_samples(config: RunConfig, points, like: Optional[SweepSample] = None) -> List[SweepSample]:
    """Simulator samples at explicit (size, k_on, v_dd) points, for the key of `like` or the configured one"""
    backend = make_backend("simulator", config.solver.to_options())
    key = {"metal": like.metal, "pattern": like.pattern, "strategy": like.strategy} if like is not None else {}
    samples = []
    for size, k_on, v_dd in points:
        spec = config.crossbar_spec(size=size, k_on=k_on, v_dd=v_dd, measurement_mode=config.model_measurement_mode, target=None, **key)
        samples.append(
            SweepSample(size=size, k_on=k_on, v_dd=v_dd, i_sneak=backend.sneak_current(spec), metal=spec.metal, pattern=spec.pattern.kind, strategy=spec.strategy)
        )
    return samples


def _check_dataset_mode(config: RunConfig, path) -> None:
    info = read_dataset_info(path)
    if info is None:
        logger.warning(f"{path} has no sidecar; assuming its currents are {config.model_measurement_mode.value}")
    elif info.measurement_mode is not config.model_measurement_mode:
        raise ConfigError(
            f"{path} was measured as {info.measurement_mode.value} but the holdout uses {config.model_measurement_mode.value}; "
            f"re-run sweep with --measurement-mode {config.model_measurement_mode.value}"
        )


def cmd_fit(config: RunConfig, args) -> int:
    if args.dataset:
        _check_dataset_mode(config, args.dataset)
        train = samples_from_dataset(read_dataset(args.dataset))
    else:
        fit_config = config.model_copy(
            update={
                "backend": Backend.SIMULATOR,
                "sweep": config.sweep.model_copy(
                    update={"metals": [config.array.metal], "patterns": [config.array.pattern], "strategies": [config.array.strategy], "with_margin": False}
                ),
            }
        )
        frame = run_sweep(fit_config, config.model_measurement_mode)
        train = samples_from_dataset(frame)
    holdout = _simulate_samples(config, default_holdout_points(), train[0] if train else None)
    result = cross_validate(train, holdout, ridge=args.ridge)
    fit = result.fit
    print_colored(f"Fitted {fit.coefficients.metal.value}/{fit.coefficients.pattern.value}/{fit.coefficients.strategy.value} on {fit.n_samples} samples", Fore.CYAN)
    for name, value in zip(FEATURE_NAMES, fit.coefficients.c):
        print(f"  {name:<11} {value: .6e}")
    stats = fit.residual_stats
    print(f"training residuals: max {stats.max:.3%} mean {stats.mean:.3%} rms {stats.rms:.3%}; condition {fit.condition_number:.3g}")
    for point in result.points:
        print(f"  holdout {point.size:>3} {point.k_on:.3g} {point.v_dd:.3g} V  sim {point.simulated:.4e}  model {point.modeled:.4e}  error {point.error_pct:+.2f}%")
    if args.save:
        CoefficientStore.load(config.output.coefficients).with_set(fit.coefficients).save(args.save)
        print_colored(f"✓ coefficients written to {args.save}", Fore.GREEN)
    gate = config.validation.fit_gate_pct
    if result.max_abs_error_pct > gate:
        raise ValidationGateError(f"holdout max |error| {result.max_abs_error_pct:.2f}% exceeds {gate:g}%")
    print_colored(f"✓ holdout max |error| {result.max_abs_error_pct:.2f}% within {gate:g}%", Fore.GREEN)
    return 0


def cmd_eval(config: RunConfig, args) -> int:
    store = CoefficientStore.load(config.output.coefficients)
    a = config.array
    coeffs = store.get(a.metal, a.pattern, a.strategy)
    value = eval_closed_form(coeffs, a.size, config.device.k_on, a.v_dd)
    print(f"{value:.9g}")
    return 0


def cmd_validate(config: RunConfig, args) -> int:
    mode = config.validation.mode
    rows = validate(config, mode)
    frame = validation_frame(rows)
    print(frame.to_string(index=False, float_format=lambda v: f"{v:.4g}"))
    failed = [r for r in rows if not r.ok]
    errors = [abs(r.error_pct) for r in rows if r.ok]
    if errors:
        print_colored(f"max |error| {max(errors):.3f}% over {len(errors)} row(s)", Fore.CYAN)
    repository = _store(config)
    if repository:
        run = repository.save_validation(rows, mode.value, config.model_dump(mode="json"))
        repository.close()
        print_colored(f"✓ stored as run {run.id}", Fore.GREEN)
    if failed:
        raise ValidationGateError(f"{len(failed)} validation point(s) failed")
    if mode is ValidationMode.PUBLISHED:
        mismatched = [r for r in rows if r.reference_error_pct is not None and abs(r.error_pct - r.reference_error_pct) > PUBLISHED_TOLERANCE_PCT]
        if mismatched:
            raise ValidationGateError(f"{len(mismatched)} row(s) differ from the published error by more than {PUBLISHED_TOLERANCE_PCT} points")
    gate = config.validation.gate_pct
    if gate is not None and errors and max(errors) > gate:
        raise ValidationGateError(f"max |error| {max(errors):.2f}% exceeds the {gate:g}% gate")
    return 0


def cmd_margin(config: RunConfig, args) -> int:
    spec = config.crossbar_spec()
    cfg = MarginConfig(r_load=args.margin_load) if args.margin_load else None
    r_load = resolve_margin_load(spec, cfg)
    array_margin = noise_margin_array(spec, MarginConfig(r_load=r_load), config.solver.to_options())
    device_margin = noise_margin_device(spec.device, spec.v_dd, r_load)
    print(f"r_load            {r_load:.6g} ohm")
    print(f"array margin      {array_margin:.9g} V")
    print(f"device margin     {device_margin:.9g} V")
    print(f"normalized margin {_fmt(array_margin / device_margin if device_margin > 0 else math.nan, '.6g')}")
    return 0


def cmd_sensitivity(config: RunConfig, args) -> int:
    spec = config.crossbar_spec(measurement_mode=config.model_measurement_mode)
    backend = make_backend(config.backend.value, config.solver.to_options(), CoefficientStore.load(config.output.coefficients))
    report = sensitivity_ranking(spec, backend, with_margin=not args.no_margin and config.backend is Backend.SIMULATOR)
    print_colored(f"Sensitivity ({report.backend}): Z_i={_fmt(report.z_i)} Z_n={_fmt(report.z_n)}", Fore.CYAN)
    for rank, f in enumerate(report.factor_rankings, 1):
        print(
            f"  {rank}. {f.parameter.value:<4} input x{f.input_factor:g}  current {_fmt(f.current_change)} "
            f"(normalized {_fmt(f.normalized_current)})  margin {_fmt(f.margin_change)}"
        )
    if report.margin_rankings:
        print("  margin order: " + " > ".join(report.margin_order()))
    return 0


def cmd_bench(config: RunConfig, args) -> int:
    sizes = args.sizes or [4, 32]
    slow = []
    for size in sizes:
        result = benchmark_runtime(size, args.points, args.repeats, config)
        flag = " (unstable)" if result.unstable else ""
        print(f"size {size:>3}: simulator {result.sim_median_s:.4g} s, closed form {result.model_median_s:.3g} s, speedup {result.speedup:.4g}x{flag}")
        if args.min_speedup and result.speedup < args.min_speedup:
            slow.append(size)
    if slow:
        raise ValidationGateError(f"speedup below {args.min_speedup:g}x at size(s) {slow}")
    return 0


def cmd_export(config: RunConfig, args) -> int:
    spec = config.crossbar_spec()
    netlist = build_crossbar(spec, args.target_state)
    text = export_spice(netlist, title=f"{spec.n}x{spec.n} {spec.pattern.kind.value} {spec.strategy.value} {spec.metal.value}") if args.format == "spice" else export_branch_list(netlist)
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text)
        print_colored(f"✓ netlist written to {args.out}", Fore.GREEN)
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "eval": cmd_eval,
    "validate": cmd_validate,
    "margin": cmd_margin,
    "sensitivity": cmd_sensitivity,
    "bench": cmd_bench,
    "export": cmd_export,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run configuration")
    common.add_argument("-v", "--verbose", action="store_true", help="INFO logging on the console")
    common.add_argument("--debug", action="store_true", help="DEBUG logging on the console")
    common.add_argument("--size", type=int)
    common.add_argument("--metal", choices=["M3", "M5", "M6"])
    common.add_argument("--pattern", choices=["AllOnes", "AllZeros"])
    common.add_argument("--strategy", choices=["FRC", "GRFC", "FRGC", "GRC"])
    common.add_argument("--k-on", dest="k_on", type=float)
    common.add_argument("--k-off", dest="k_off", type=float)
    common.add_argument("--v-dd", dest="v_dd", type=float)
    common.add_argument("--r-load", dest="r_load", type=float)
    common.add_argument("--measurement-mode", dest="measurement_mode", choices=[m.value for m in MeasurementMode])
    common.add_argument("--backend", choices=["simulator", "closed_form"])
    common.add_argument("--coefficients", help="coefficient JSON overlaid on the published tables")
    common.add_argument("--workers", type=int)

    parser = argparse.ArgumentParser(prog="sneakpath", description="Memristor crossbar sneak-path analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="solve one operating point")
    p.add_argument("--dump", action="store_true", help="print the node-voltage map as JSON")

    p = sub.add_parser("sweep", parents=[common], help="evaluate a parameter grid into a CSV dataset")
    p.add_argument("--out", help="CSV path (stdout when omitted)")
    p.add_argument("--sizes", type=int, nargs="+")
    p.add_argument("--k-on-values", dest="k_on_values", type=float, nargs="+")
    p.add_argument("--v-dd-values", dest="v_dd_values", type=float, nargs="+")
    p.add_argument("--metals", nargs="+", choices=["M3", "M5", "M6"])
    p.add_argument("--patterns", nargs="+", choices=["AllOnes", "AllZeros"])
    p.add_argument("--strategies", nargs="+", choices=["FRC", "GRFC", "FRGC", "GRC"])
    p.add_argument("--with-margin", dest="with_margin", action="store_true")
    p.add_argument("--no-runtime", dest="no_runtime", action="store_true", help="leave runtime_s empty for byte-stable output")
    p.add_argument("--store", action="store_true", help="persist the rows to the results database")

    p = sub.add_parser("fit", parents=[common], help="refit the closed form on simulator data")
    p.add_argument("--dataset", help="sweep CSV to fit instead of running a fresh sweep")
    p.add_argument("--sizes", type=int, nargs="+")
    p.add_argument("--ridge", type=float, default=0.0)
    p.add_argument("--save", help="write the refitted coefficient store to this JSON path")

    sub.add_parser("eval", parents=[common], help="evaluate the closed form at one point")

    p = sub.add_parser("validate", parents=[common], help="closed form against simulator or published values")
    p.add_argument("--mode", choices=[m.value for m in ValidationMode])
    p.add_argument("--gate", type=float, help="fail (exit 4) when any |error| exceeds this percentage")
    p.add_argument("--store", action="store_true")

    p = sub.add_parser("margin", parents=[common], help="array, device and normalized noise margins")
    p.add_argument("--margin-load", dest="margin_load", type=float, help="sensing load (default: geometric-mean rule)")

    p = sub.add_parser("sensitivity", parents=[common], help="rank Vdd, Kon and Size by sensitivity")
    p.add_argument("--no-margin", dest="no_margin", action="store_true")

    p = sub.add_parser("bench", parents=[common], help="closed-form speedup over the simulator")
    p.add_argument("--sizes", type=int, nargs="+")
    p.add_argument("--points", type=int, default=1)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--min-speedup", dest="min_speedup", type=float)

    p = sub.add_parser("export", parents=[common], help="write the netlist as a branch list or SPICE deck")
    p.add_argument("--format", choices=["branches", "spice"], default="branches")
    p.add_argument("--target-state", dest="target_state", choices=["LRS", "HRS", "FromPattern"], default="FromPattern")
    p.add_argument("--out")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code"""
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.debug else logging.INFO if args.verbose else getattr(logging, settings.log_level.upper(), logging.WARNING)
    configure_logging(level)
    try:
        config = load_run_config(args.config, _overrides(args))
        return COMMANDS[args.command](config, args)
    except SneakPathError as e:
        logger.error(f"{args.command} failed: {str(e)}", exc_info=args.debug)
        print_colored(f"Error: {str(e)}", Fore.RED)
        print(json.dumps(e.to_record()), file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.error(f"Fatal error: {str(e)}", exc_info=True)
        print_colored(f"Fatal error: {str(e)}", Fore.RED)
        print(json.dumps({"error_code": 1, "error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
