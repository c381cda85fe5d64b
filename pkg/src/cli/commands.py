"""
Command-line surface of photon-dimer
"""

import argparse
import logging
import sys
from typing import Any, Dict, List

from src.cli import sweep
from src.core import observables
from src.core.config import PresetManager, load_config_file, parse_override

logger = logging.getLogger(__name__)

# (subcommand, observable, default sweep variable, default range, log grid)
SWEEP_COMMANDS = {
    "scan1": ("scan1", "delta", (-10.0, 10.0, 2001), False),
    "probs": ("probs", "delta", (-4.0, 12.0, sweep.DELTA_POINTS), False),
    "g2": ("g2", "delta", (-4.0, 12.0, sweep.DELTA_POINTS), False),
    "loss": ("loss", "delta", (-4.0, 4.0, sweep.DELTA_POINTS), False),
    "sbar": ("sbar", "delta", (-4.0, 12.0, sweep.DELTA_POINTS), False),
    "lindblad": ("lindblad", "delta", (-4.0, 12.0, sweep.DELTA_POINTS), False),
    "initg2": ("initg2", "dk", (0.0, 0.1, 51), False),
    "excite": ("excite", "u", (sweep.U_RANGE[0], sweep.U_RANGE[1], sweep.U_POINTS), True),
}


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", help="JSON parameter file")
    parser.add_argument("--preset", help="saved parameter set, applied before --config")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one setting, may be repeated")
    parser.add_argument("--out", help="CSV output file, standard output if omitted")
    parser.add_argument("--u", type=float, help="Kerr nonlinearity of both cavities")
    parser.add_argument("--vsq", type=float, help="waveguide coupling V² of both cavities")
    parser.add_argument("--gamma-bath", type=float, help="intrinsic cavity loss rate")
    parser.add_argument("--shape", choices=("gaussian", "lorentzian", "rising"))
    parser.add_argument("--sigma", type=float, help="pulse width sigma/J")
    parser.add_argument("--density", type=int, help="quadrature node density multiplier")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return parser


def _sweep_parser(var: str, lo: float, hi: float, n: int, log: bool,
                  energy_range: bool = False) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--sweep", default=var, choices=sweep.SWEEP_VARS)
    # scan1 sweeps the photon energy and also takes --emin/--emax
    low = ("--min", "--emin") if energy_range else ("--min",)
    high = ("--max", "--emax") if energy_range else ("--max",)
    parser.add_argument(*low, dest="min", type=float, default=lo)
    parser.add_argument(*high, dest="max", type=float, default=hi)
    parser.add_argument("--n", type=int, default=n)
    parser.add_argument("--log", action="store_true", default=log, help="logarithmic grid")
    parser.add_argument("--dk-mode", default="resonant", choices=sweep.DK_MODES)
    parser.add_argument("--dk", type=float, default=0.0, help="fixed photon splitting")
    parser.add_argument("--delta", type=float, help="fixed two-photon detuning")
    parser.add_argument("--delta-state", choices=("minus", "zero", "plus"),
                        help="pin delta to a two-excitation eigenenergy")
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photon-dimer",
        description="Few-photon scattering off a waveguide-coupled Bose-Hubbard dimer")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()

    for name, (_, var, (lo, hi, n), log) in SWEEP_COMMANDS.items():
        ranges = _sweep_parser(var, lo, hi, n, log, energy_range=name == "scan1")
        cmd = sub.add_parser(name, parents=[common, ranges])
        cmd.set_defaults(handler=run_sweep_command)
        if name == "g2":
            cmd.add_argument("--source", choices=("fock", "coherent"), default="fock")
            cmd.add_argument("--nbar", type=float, default=1e-3)
            cmd.add_argument("--flux", choices=observables.FLUX_FORMS, default="single",
                             help="g² denominator: independent photons or the exact output")
        elif name == "sbar":
            cmd.add_argument("--v2", type=float, nargs="+", metavar="VSQ",
                             help="one series per coupling V²")
            cmd.add_argument("--box", type=float, default=8.0)
        elif name == "loss":
            cmd.add_argument("--gamma-list", type=float, nargs="+", default=[0.0, 0.02, 0.04])
            cmd.add_argument("--flux", choices=observables.FLUX_FORMS, default="single")
        elif name == "lindblad":
            cmd.add_argument("--omega", type=float, default=2e-4, help="drive strength")
            cmd.add_argument("--gamma", type=float, help="cavity decay rate, V² if omitted")
            cmd.add_argument("--nmax", type=int, default=4)

    smap = sub.add_parser("smap", parents=[common])
    smap.add_argument("--delta", type=float, default=0.0)
    smap.add_argument("--v2", dest="vsq", type=float, help="waveguide coupling V², same as --vsq")
    smap.add_argument("--box", type=float, default=8.0)
    smap.add_argument("--n", type=int, default=161)
    smap.set_defaults(handler=run_smap_command)

    recipe = sub.add_parser("recipe", parents=[common], help="run a committed sweep spec")
    recipe.add_argument("file")
    recipe.set_defaults(handler=run_recipe_command)

    preset = sub.add_parser("preset", parents=[common], help="manage saved parameter sets")
    preset.add_argument("action", choices=("save", "list", "remove"))
    preset.add_argument("name", nargs="?")
    preset.set_defaults(handler=run_preset_command)
    return parser


def _flag_layer(args: argparse.Namespace) -> Dict[str, Any]:
    flags = {"u": args.u, "vsq": args.vsq, "gamma_bath": args.gamma_bath,
             "shape": args.shape, "sigma_over_j": args.sigma, "density": args.density}
    return {key: value for key, value in flags.items() if value is not None}


def settings_layers(args: argparse.Namespace) -> List[Dict[str, Any]]:
    """Setting layers in increasing precedence: preset, config, flags, --set"""
    layers = []
    if args.preset:
        layers.append(PresetManager().get_preset(args.preset))
    if args.config:
        layers.append(load_config_file(args.config))
    layers.append(_flag_layer(args))
    for text in args.overrides:
        layers.append(parse_override(text))
    return layers


def _finish(result: sweep.SweepResult, out) -> int:
    sweep.write_csv(result.table, out)
    if result.warnings:
        logger.warning("%d point(s) carried quadrature warnings", result.warnings)
        return 2
    return 0


def run_sweep_command(args: argparse.Namespace) -> int:
    observable = SWEEP_COMMANDS[args.command][0]
    extras: Dict[str, Any] = {}
    series: List[Dict[str, Any]] = [{}]
    if args.delta is not None:
        extras["delta"] = args.delta
    if args.delta_state:
        extras["delta_state"] = args.delta_state
    elif args.sweep == "u" and args.delta is None:
        extras["delta_state"] = "zero"
    if observable == "g2":
        extras.update(source=args.source, nbar=args.nbar, flux=args.flux)
    elif observable == "sbar":
        extras["box"] = args.box
        if args.v2:
            series = [{"vsq": v} for v in args.v2]
    elif observable == "loss":
        series = [{"gamma_bath": g} for g in args.gamma_list]
        extras["flux"] = args.flux
    elif observable == "lindblad":
        extras.update(omega_drive=args.omega, gamma=args.gamma, n_max=args.nmax)
    spec = sweep.SweepSpec(
        observable=observable, values=sweep.grid(args.min, args.max, args.n, args.log),
        sweep_var=args.sweep, dk_mode=args.dk_mode, dk=args.dk,
        settings=settings_layers(args), series=series, extras=extras)
    return _finish(sweep.run(spec), args.out)


def run_smap_command(args: argparse.Namespace) -> int:
    spec = sweep.SweepSpec(observable="smap", values=[args.delta], sweep_var="delta",
                           settings=settings_layers(args),
                           extras={"box": args.box, "n": args.n})
    return _finish(sweep.run(spec), args.out)


def run_recipe_command(args: argparse.Namespace) -> int:
    spec = sweep.load_recipe(args.file)
    spec.settings = spec.settings + settings_layers(args)
    return _finish(sweep.run(spec), args.out)


def run_preset_command(args: argparse.Namespace) -> int:
    manager = PresetManager()
    if args.action == "list":
        for name in manager.get_preset_names():
            print(name)
        return 0
    if not args.name:
        print("Error: preset name required", file=sys.stderr)
        return 1
    if args.action == "save":
        values: Dict[str, Any] = {}
        for layer in settings_layers(argparse.Namespace(**{**vars(args), "preset": None})):
            values.update(layer)
        manager.save_preset(args.name, values)
        return 0
    if not manager.remove_preset(args.name):
        print(f"Error: no preset named '{args.name}'", file=sys.stderr)
        return 1
    return 0
