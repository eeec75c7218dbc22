"""Command line front end.

One command per invocation::

    crystalspectra bands --crystal builtin:hexagonal --grid 64 --out bands.csv
    crystalspectra oracle --crystal builtin:zd:1 --N 4
    crystalspectra thresholds --crystal builtin:zd:1 --grid 64 --refine 40

Dense tables are written as CSV (17 significant digits, LF line endings), structured
reports as JSON. Exit status: 0 success, 1 invalid input, 2 numerical failure.
"""
import io
import os
import sys
import json
import logging
import logging.config
import argparse

import numpy as np

from .consts import CrystalConventions as const
from .crystal import PerturbationSpec, load_perturbation_file, resolve_crystal, validate
from .exceptions import ConfigurationError, NumericalError
from .bands import (DEFAULT_REFINE_ITERS, density_of_states, estimate_thresholds, mourre_constant,
                    sample_bands)
from .realspace import Box, ORACLE_TOL, build_h, build_h0, spectrum, torus_oracle
from .scatter import evolve, gaussian_packet, wave_operator_probe
from .symbols import FunctionProfile, PowerLawProfile, check_decay, check_hypotheses
from .utils import csv_text, parse_floats, parse_interval
from .version import __version__

_log = logging.getLogger(__name__)
_log.addHandler(logging.NullHandler())

LOGGING_CONFIG = os.path.join(os.path.dirname(os.path.abspath(__file__)), "logging.ini")

COMMANDS = ("validate", "bands", "spectrum", "thresholds", "mourre", "oracle", "decay", "evolve", "scatter")


class RunConfig(object):
    """
    Validated parameters of a single command.

    Args:
        command (str): one of ``COMMANDS``
        **options: parameters; unknown keys are rejected

    Raises:
        ConfigurationError: unknown command or key, malformed or out of range value

    Example:
       >>> from crystalspectra.cli import RunConfig
       >>> RunConfig("bands", crystal="builtin:zd:1", grid=8).grid
       8

    """

    DEFAULTS = {
        "crystal": None,
        "perturbation": None,
        "grid": None,
        "box": None,
        "interval": None,
        "times": None,
        "out": None,
        "tol": None,
        "refine": DEFAULT_REFINE_ITERS,
        "method": const.CHEBYSHEV,
        "dos": None,
        "N": None,
        "mode": const.SHORT,
        "exponent": None,
        "amplitude": 1.0,
        "K": 20,
        "dim": 1,
        "hypotheses": False,
        "center": None,
        "width": 6.0,
        "xi0": None,
        "verbose": False,
    }

    def __init__(self, command, **options):
        if command not in COMMANDS:
            raise ConfigurationError("unknown command: {0}".format(command))
        unknown = sorted(set(options) - set(self.DEFAULTS))
        if unknown:
            raise ConfigurationError("unknown configuration keys: {0}".format(", ".join(unknown)))
        self.command = command
        for key, default in self.DEFAULTS.items():
            value = options.get(key)
            setattr(self, key, default if value is None else value)
        self._check()

    def _check(self):
        for key in ("grid", "N", "dos", "K", "dim"):
            value = getattr(self, key)
            if value is not None and (not isinstance(value, int) or isinstance(value, bool) or value < 1):
                raise ConfigurationError("{0} must be a positive integer, got {1!r}".format(key, value))
        if not isinstance(self.refine, int) or self.refine < 0:
            raise ConfigurationError("refine must be a nonnegative integer, got {0!r}".format(self.refine))
        if self.tol is not None and not float(self.tol) > 0:
            raise ConfigurationError("tol must be positive, got {0!r}".format(self.tol))
        if self.tol is not None and self.command != "oracle":
            raise ConfigurationError("--tol only applies to oracle")
        if self.width is not None and not float(self.width) > 0:
            raise ConfigurationError("width must be positive, got {0!r}".format(self.width))
        if isinstance(self.box, str):
            self.box = Box.parse(self.box)
        if self.interval is not None:
            self.interval = parse_interval(self.interval)
        if isinstance(self.times, str):
            self.times = parse_floats(self.times)
        for key in ("center", "xi0"):
            if isinstance(getattr(self, key), str):
                setattr(self, key, parse_floats(getattr(self, key)))
        if self.method not in (const.CHEBYSHEV, const.DENSE_EXP):
            raise ConfigurationError("unknown method: {0}".format(self.method))
        if self.mode not in (const.SHORT, const.LONG):
            raise ConfigurationError("unknown decay mode: {0}".format(self.mode))

        needs_crystal = self.command != "decay" or self.hypotheses
        if needs_crystal and not self.crystal:
            raise ConfigurationError("--crystal is required for {0}".format(self.command))
        required = {
            "mourre": ("interval",),
            "spectrum": ("box",),
            "evolve": ("box", "times"),
            "scatter": ("box", "times", "interval"),
        }
        for key in required.get(self.command, ()):
            if getattr(self, key) is None:
                raise ConfigurationError("--{0} is required for {1}".format(key, self.command))
        if self.command == "decay" and not self.hypotheses and self.exponent is None:
            raise ConfigurationError("decay needs --exponent or --hypotheses")
        if self.command == "decay" and self.hypotheses and not self.perturbation:
            raise ConfigurationError("--hypotheses needs --perturbation")


def _dump(report):
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def _write(config, text):
    if config.out:
        with io.open(config.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _perturbation(config, g):
    if config.perturbation:
        return load_perturbation_file(config.perturbation, g)
    return PerturbationSpec()


def _operator(config, g, p):
    return build_h0(g, config.box) if p.is_empty else build_h(g, p, config.box)


def _packet(config, op):
    d = op.graph.d
    center = config.center if config.center is not None else [0.0] * d
    xi0 = config.xi0 if config.xi0 is not None else [0.25] * d
    return gaussian_packet(op, center, float(config.width), xi0)


def _validate(config):
    g = resolve_crystal(config.crystal)
    diagnostics = validate(g)
    if config.perturbation:
        load_perturbation_file(config.perturbation, g)
    return 0, _dump({"crystal": config.crystal, "n": g.n, "d": g.d,
                     "oriented_edges": len(g.oriented_edges), "diagnostics": diagnostics})


def _bands(config):
    g = resolve_crystal(config.crystal)
    sample = sample_bands(g, config.grid or 64)
    if config.dos:
        return 0, density_of_states(sample, bins=config.dos).to_csv()
    return 0, sample.to_csv()


def _spectrum(config):
    g = resolve_crystal(config.crystal)
    values = spectrum(_operator(config, g, _perturbation(config, g)))
    if config.interval is not None:
        a, b = config.interval
        values = values[(values >= a) & (values <= b)]
    return 0, csv_text(["k", "lambda"], [(k, v) for k, v in enumerate(values)])


def _thresholds(config):
    g = resolve_crystal(config.crystal)
    return 0, estimate_thresholds(g, N=config.grid or 64, refine_iters=config.refine).to_json() + "\n"


def _mourre(config):
    g = resolve_crystal(config.crystal)
    return 0, mourre_constant(g, config.interval, N=config.grid or 256).to_json() + "\n"


def _oracle(config):
    g = resolve_crystal(config.crystal)
    record = torus_oracle(g, config.N or config.grid or 4, tol=config.tol or ORACLE_TOL)
    return (0 if record.passed else 2), record.summary() + "\n"


def _decay(config):
    if config.hypotheses:
        g = resolve_crystal(config.crystal)
        reports = check_hypotheses(g, _perturbation(config, g), K=config.K)
        return 0, _dump(dict((key, report.to_dict()) for key, report in sorted(reports.items())))
    amplitude, exponent = float(config.amplitude), float(config.exponent)
    if config.dim == 1 and config.mode == const.SHORT:
        profile = PowerLawProfile(amplitude, exponent)
    else:
        profile = FunctionProfile(lambda mu: amplitude * (1.0 + np.sqrt(np.dot(mu, mu))) ** (-exponent),
                                  config.dim)
    return 0, check_decay(profile, config.mode, K=config.K, d=config.dim).to_json() + "\n"


def _evolve(config):
    g = resolve_crystal(config.crystal)
    op = _operator(config, g, _perturbation(config, g))
    psi = _packet(config, op)
    norms, elapsed = [], 0.0
    for t in config.times:
        psi = evolve(op, psi, t - elapsed, config.method)
        elapsed = t
        norms.append(float(np.linalg.norm(psi)))
    drift = max(abs(norm - 1.0) for norm in norms)
    return 0, _dump({"times": list(config.times), "norms": norms, "max_norm_drift": drift,
                     "method": config.method, "dimension": op.dimension})


def _scatter(config):
    g = resolve_crystal(config.crystal)
    p = _perturbation(config, g)
    psi = _packet(config, build_h0(g, config.box))
    record = wave_operator_probe(g, p, config.interval, psi, config.times, config.box, method=config.method)
    return 0, record.to_json() + "\n"


HANDLERS = {
    "validate": _validate,
    "bands": _bands,
    "spectrum": _spectrum,
    "thresholds": _thresholds,
    "mourre": _mourre,
    "oracle": _oracle,
    "decay": _decay,
    "evolve": _evolve,
    "scatter": _scatter,
}


def run(config):
    """executes the command of a RunConfig and writes its output

        Returns:
            int: 0 on success, 1 on invalid input, 2 on numerical failure

    """
    try:
        status, text = HANDLERS[config.command](config)
        _write(config, text)
    except NumericalError as e:
        sys.stderr.write("numerical failure: {0}\n".format(e))
        return 2
    except (ValueError, KeyError, IOError) as e:
        sys.stderr.write("error: {0}\n".format(e))
        return 1
    return status


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--crystal", help="builtin:NAME, path or URL of a definition document")
    common.add_argument("--perturbation", help="path or URL of a perturbation document")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--tol", type=float)
    common.add_argument("--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(prog="crystalspectra", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    commands.add_parser("validate", parents=[common])
    bands = commands.add_parser("bands", parents=[common])
    bands.add_argument("--grid", type=int)
    bands.add_argument("--dos", type=int, metavar="BINS", help="density of states histogram")
    spectrum_cmd = commands.add_parser("spectrum", parents=[common])
    spectrum_cmd.add_argument("--box", help="torus:N or truncated:L")
    spectrum_cmd.add_argument("--interval", help="a,b")
    thresholds = commands.add_parser("thresholds", parents=[common])
    thresholds.add_argument("--grid", type=int)
    thresholds.add_argument("--refine", type=int)
    mourre = commands.add_parser("mourre", parents=[common])
    mourre.add_argument("--grid", type=int)
    mourre.add_argument("--interval", help="a,b")
    oracle = commands.add_parser("oracle", parents=[common])
    oracle.add_argument("--N", type=int)
    decay = commands.add_parser("decay", parents=[common])
    decay.add_argument("--mode", choices=[const.SHORT, const.LONG])
    decay.add_argument("--exponent", type=float)
    decay.add_argument("--amplitude", type=float)
    decay.add_argument("--K", type=int)
    decay.add_argument("--dim", type=int)
    decay.add_argument("--hypotheses", action="store_true")
    for name in ("evolve", "scatter"):
        sub = commands.add_parser(name, parents=[common])
        sub.add_argument("--box", help="torus:N or truncated:L")
        sub.add_argument("--times", help="t1,t2,...")
        sub.add_argument("--method", choices=[const.CHEBYSHEV, const.DENSE_EXP])
        sub.add_argument("--center", help="packet center, comma separated")
        sub.add_argument("--width", type=float)
        sub.add_argument("--xi0", help="packet quasi-momentum, comma separated")
        if name == "scatter":
            sub.add_argument("--interval", help="a,b")
    return parser


def main(argv=None):
    """console entry point"""
    args = vars(_parser().parse_args(argv))
    logging.config.fileConfig(LOGGING_CONFIG, disable_existing_loggers=False)
    if args.get("verbose"):
        logging.getLogger("crystalspectra").setLevel(logging.DEBUG)
    command = args.pop("command")
    try:
        config = RunConfig(command, **args)
    except ConfigurationError as e:
        sys.stderr.write("error: {0}\n".format(e))
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
