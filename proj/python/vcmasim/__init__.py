"""Macrospin VCMA/STT switching simulator and crossbar models."""

import json

from . import _core
from ._core import InvalidParameter, SolverError

__all__ = [
    "InvalidParameter",
    "SolverError",
    "default_config",
    "resolve_config",
    "llg_rhs",
    "simulate",
    "switching_probability",
    "sweep_width",
    "sweep_amplitude",
    "ordering_in_cap",
    "exit_histogram",
    "sneak_solve",
    "write_disturb",
    "run_cli",
]


def _cfg(config):
    return json.dumps(config or {})


def default_config():
    """Full default configuration as a dict."""
    return json.loads(_core.default_config_json())


def resolve_config(config=None):
    """Merge a partial config over the defaults and validate it."""
    return json.loads(_core.resolve_config_json(_cfg(config)))


def llg_rhs(m, h_eff, spin_current=(0.0, 0.0, 0.0), config=None):
    return _core.llg_rhs(m, h_eff, spin_current, _cfg(config))


def simulate(segments, seed, trial=0, config=None):
    """One trial. segments: [(voltage V, duration s), ...]."""
    return _core.simulate(segments, seed, trial, _cfg(config))


def switching_probability(segments, n_trials, seed, config=None, threads=1):
    return _core.switching_probability(segments, n_trials, seed, _cfg(config), threads)


def sweep_width(voltage, widths, n_trials, seed, config=None, threads=1):
    return _core.sweep_width(voltage, widths, n_trials, seed, _cfg(config), threads)


def sweep_amplitude(width, amplitudes, n_trials, seed, config=None, threads=1):
    return _core.sweep_amplitude(width, amplitudes, n_trials, seed, _cfg(config), threads)


def ordering_in_cap(voltage, cap_angle=0.5, grid_n=72, config=None):
    """Returns (ordering string, agreement fraction)."""
    return _core.ordering_in_cap(voltage, cap_angle, grid_n, _cfg(config))


def exit_histogram(voltage, n_trials, seed, config=None, threads=1):
    return _core.exit_histogram(voltage, n_trials, seed, _cfg(config), threads)


def sneak_solve(conductances, driven_row, driven_col, voltage):
    """conductances: rows x cols nested list in siemens (0 marks an open cell)."""
    return _core.sneak_solve([list(map(float, r)) for r in conductances], driven_row, driven_col, voltage)


def write_disturb(rows, cols, p_sel, p_half):
    return _core.write_disturb(rows, cols, p_sel, p_half)


def run_cli(args):
    """Runs the command line tool in-process; returns (exit code, stdout, stderr)."""
    return _core.run_cli([str(a) for a in args])
