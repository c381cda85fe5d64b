"""
Sweep orchestration: evaluate an observable over a parameter grid into a table
"""

import json
import logging
import math
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.core import lindblad, observables
from src.core.config import RunConfig, resolve
from src.core.errors import ConfigError, NoSignalError, QuadratureWarning
from src.core.model import fully_resonant_dk, photon_momenta, two_excitation_eigensystem
from src.core.single_photon import scatter1
from src.core.wavepackets import (CoherentInput, PulseProfile, TwoPhotonInput,
                                  initial_g2)

logger = logging.getLogger(__name__)

OBSERVABLES = ("probs", "g2", "sbar", "smap", "lindblad", "initg2", "scan1", "loss", "excite")
SWEEP_VARS = ("delta", "u", "dk", "gamma")
DK_MODES = ("resonant", "zero", "fixed")
RECIPE_KEYS = ("observable", "sweep", "values", "dk_mode", "dk", "settings", "series", "extras")

DELTA_POINTS = 241
U_POINTS = 61
U_RANGE = (0.1, 50.0)


def grid(lo: float, hi: float, n: int, log: bool = False) -> List[float]:
    """Sweep values, linear or logarithmic

    Raises:
        ConfigError: unless n >= 2 and lo < hi
    """
    if n < 2:
        raise ConfigError("a sweep needs at least 2 points", key="n")
    if not lo < hi:
        raise ConfigError(f"sweep range is empty: min {lo} >= max {hi}", key="min")
    if log:
        if lo <= 0:
            raise ConfigError("logarithmic sweeps need a positive minimum", key="min")
        return [float(v) for v in np.geomspace(lo, hi, n)]
    return [float(v) for v in np.linspace(lo, hi, n)]


@dataclass
class SweepSpec:
    """Class representing one sweep: observable, grid, settings and series

    Attributes:
        settings: config layers merged in order, later ones winning
        series: one extra override layer per output series
        extras: observable-specific options (source, nbar, omega_drive, ...)
    """

    observable: str
    values: Sequence[float]
    sweep_var: str = "delta"
    dk_mode: str = "resonant"
    dk: float = 0.0
    settings: List[Dict[str, Any]] = field(default_factory=list)
    series: List[Dict[str, Any]] = field(default_factory=lambda: [{}])
    extras: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.observable not in OBSERVABLES:
            raise ConfigError(f"unknown observable '{self.observable}'", key="observable")
        if self.sweep_var not in SWEEP_VARS:
            raise ConfigError(f"unknown sweep variable '{self.sweep_var}'", key="sweep")
        if self.dk_mode not in DK_MODES:
            raise ConfigError(f"unknown dk mode '{self.dk_mode}'", key="dk_mode")
        if len(self.values) < 1:
            raise ConfigError("sweep has no values", key="values")
        if not self.series:
            self.series = [{}]


@dataclass(frozen=True)
class SweepResult:
    table: pd.DataFrame
    warnings: int


@dataclass(frozen=True)
class SweepPoint:
    """Resolved settings of one grid point"""

    config: RunConfig
    delta: float
    dk: float

    @property
    def params(self):
        return self.config.params

    def two_photon(self) -> TwoPhotonInput:
        k1, k2 = photon_momenta(self.delta, self.dk)
        return TwoPhotonInput(PulseProfile(self.config.shape, k1, self.config.sigma),
                              PulseProfile(self.config.shape, k2, self.config.sigma))

    def labels(self, series: int) -> Dict[str, Any]:
        return {"series": series, "delta": self.delta, "dk": self.dk,
                "u": self.params.u1, "gamma_bath": self.params.gamma_bath}


def resolve_point(spec: SweepSpec, series: Mapping[str, Any], value: float) -> SweepPoint:
    """Apply the sweep value and the dk mode to the merged settings"""
    layers = list(spec.settings) + [series]
    if spec.sweep_var == "u":
        layers.append({"u": value})
    elif spec.sweep_var == "gamma":
        layers.append({"gamma_bath": value})
    config = resolve(layers)

    if spec.sweep_var == "delta":
        delta = value
    elif "delta_state" in spec.extras:
        delta = two_excitation_eigensystem(config.params).state(spec.extras["delta_state"])[0]
    else:
        delta = float(spec.extras.get("delta", 0.0))

    if spec.sweep_var == "dk":
        dk = value
    elif spec.dk_mode == "resonant":
        dk = fully_resonant_dk(delta, config.params)
    elif spec.dk_mode == "zero":
        dk = 0.0
    else:
        dk = float(spec.dk)
    return SweepPoint(config=config, delta=float(delta), dk=float(dk))


def _scan1(spec: SweepSpec, point: SweepPoint, series: int, value: float) -> List[Dict]:
    s = scatter1(point.params, value)
    r, t = complex(s.r), complex(s.t)
    return [{"series": series, "E": value, "re_r": r.real, "im_r": r.imag,
             "re_t": t.real, "im_t": t.imag, "abs_t2": abs(t) ** 2, "abs_r2": abs(r) ** 2,
             "flux": float(s.flux), "u": point.params.u1,
             "gamma_bath": point.params.gamma_bath}]


def _probs(spec: SweepSpec, point: SweepPoint, series: int, value: float) -> List[Dict]:
    probs = observables.scattering_probabilities(point.params, point.two_photon(),
                                                 point.config.density)
    return [dict(point.labels(series), p_ll=probs.p_ll, p_lr=probs.p_lr, p_rr=probs.p_rr,
                 flux=probs.flux_total)]


def _g2(spec: SweepSpec, point: SweepPoint, series: int, value: float) -> List[Dict]:
    density = point.config.density
    try:
        if spec.extras.get("source", "fock") == "coherent":
            profile = PulseProfile(point.config.shape, 0.5 * point.delta, point.config.sigma)
            coherent = CoherentInput(profile, float(spec.extras.get("nbar", 1e-3)))
            g2 = observables.g2_coherent(point.params, coherent, density=density)
            row = dict(point.labels(series), dk=math.nan, g2_rr=g2)
            return [row]
        g2 = observables.g2_transmitted(point.params, point.two_photon(), density=density,
                                        flux=spec.extras.get("flux", "single"))
    except NoSignalError as e:
        logger.warning("delta=%g: %s", point.delta, e)
        g2 = math.nan
    return [dict(point.labels(series), g2_rr=g2)]


def _sbar(spec: SweepSpec, point: SweepPoint, series: int, value: float) -> List[Dict]:
    weight = observables.bound_weight(point.params, point.delta,
                                      box=float(spec.extras.get("box", 8.0)))
    return [dict(point.labels(series), dk=math.nan, vsq=point.params.vsq2, sbar=weight)]


def _smap(spec: SweepSpec, point: SweepPoint, series: int, value: float) -> List[Dict]:
    box = float(spec.extras.get("box", 8.0))
    n = int(spec.extras.get("n", 161))
    axis = np.linspace(-box, box, n)
    values = observables.bound_map(point.params, point.delta, axis, axis)
    labels = point.labels(series)
    return [dict(labels, dk=float(dk), dp=float(dp), abs_SRR2=float(values[i, j]))
            for i, dk in enumerate(axis) for j, dp in enumerate(axis)]


def _lindblad(spec: SweepSpec, point: SweepPoint, series: int, value: float) -> List[Dict]:
    omega = float(spec.extras.get("omega_drive", 2e-4))
    gamma = spec.extras.get("gamma")
    state = lindblad.solve(point.params, point.delta, omega,
                           None if gamma is None else float(gamma),
                           int(spec.extras.get("n_max", 4)))
    try:
        g2 = lindblad.g2_steady(state.rho, state.basis)
    except NoSignalError as e:
        logger.warning("delta=%g: %s", point.delta, e)
        g2 = math.nan
    return [dict(point.labels(series), dk=math.nan, n2_occupation=lindblad.occupation(state),
                 g2_ss=g2, residual=state.residual)]


def _initg2(spec: SweepSpec, point: SweepPoint, series: int, value: float) -> List[Dict]:
    pair = point.two_photon()
    return [dict(point.labels(series), m2=pair.m2, g2_initial=initial_g2(pair, 0.0, 0.0))]


def _loss(spec: SweepSpec, point: SweepPoint, series: int, value: float) -> List[Dict]:
    pair = point.two_photon()
    state = observables.OutputState(point.params, pair, point.config.density)
    probs = state.probabilities()
    try:
        g2 = observables.g2_transmitted(point.params, pair, density=point.config.density,
                                        state=state, flux=spec.extras.get("flux", "single"))
    except NoSignalError as e:
        logger.warning("delta=%g: %s", point.delta, e)
        g2 = math.nan
    return [dict(point.labels(series), p_rr=probs.p_rr, flux=probs.flux_total,
                 g2_rr=g2)]


def _excite(spec: SweepSpec, point: SweepPoint, series: int, value: float) -> List[Dict]:
    e11, e12, e22 = observables.excitation_amplitudes(point.params, point.delta, point.dk)
    weights = observables.eigenstate_projection(point.params, point.delta, point.dk)
    return [dict(point.labels(series), abs_e11=e11, abs_e12=e12, abs_e22=e22,
                 **{f"w_{name}": w for name, w in weights.items()})]


EVALUATORS = {
    "scan1": _scan1, "probs": _probs, "g2": _g2, "sbar": _sbar, "smap": _smap,
    "lindblad": _lindblad, "initg2": _initg2, "loss": _loss, "excite": _excite,
}


def evaluate_point(spec: SweepSpec, series: int, value: float) -> Tuple[List[Dict], int]:
    """Rows of one grid point and the number of quadrature warnings it raised"""
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", QuadratureWarning)
        point = resolve_point(spec, spec.series[series], value)
        rows = EVALUATORS[spec.observable](spec, point, series, value)
    flagged = sum(1 for w in caught if issubclass(w.category, QuadratureWarning))
    if flagged:
        logger.warning("%s at %s=%g: %d quadrature warning(s)", spec.observable,
                       spec.sweep_var, value, flagged)
    logger.debug("%s at %s=%g took %.3f s", spec.observable, spec.sweep_var, value,
                 time.perf_counter() - start)
    return rows, flagged


def _evaluate_task(task: Tuple[SweepSpec, int, float]) -> Tuple[List[Dict], int]:
    return evaluate_point(*task)


def thread_count() -> int:
    raw = os.environ.get("PHOTON_DIMER_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"PHOTON_DIMER_THREADS must be an integer, got '{raw}'",
                          key="PHOTON_DIMER_THREADS") from None


def run(spec: SweepSpec, threads: Optional[int] = None) -> SweepResult:
    """Evaluate every (series, value) point in order

    Points run in a process pool when more than one worker is allowed;
    rows are always emitted in grid order.
    """
    threads = threads or thread_count()
    tasks = [(spec, s, float(v)) for s in range(len(spec.series)) for v in spec.values]
    logger.info("%s: %d points over %s, %d worker(s)", spec.observable, len(tasks),
                spec.sweep_var, threads)
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(_evaluate_task, tasks))
    else:
        results = [_evaluate_task(task) for task in tasks]
    rows = [row for point_rows, _ in results for row in point_rows]
    return SweepResult(table=pd.DataFrame(rows), warnings=sum(n for _, n in results))


def write_csv(table: pd.DataFrame, out: Optional[str] = None) -> None:
    """Write a result table as CSV to a file or standard output"""
    table.to_csv(out if out else sys.stdout, index=False, float_format="%.12g",
                 lineterminator="\n")


def spec_from_mapping(data: Mapping[str, Any], source: Optional[str] = None) -> SweepSpec:
    """Build a SweepSpec from a recipe object

    Raises:
        ConfigError: for unknown keys or malformed sweep ranges
    """
    for key in data:
        if key not in RECIPE_KEYS:
            raise ConfigError(f"unknown recipe key '{key}'", source=source, key=key)
    if "observable" not in data:
        raise ConfigError("recipe needs an 'observable'", source=source, key="observable")
    sweep = dict(data.get("sweep", {}))
    if "values" in data:
        values = [float(v) for v in data["values"]]
    else:
        try:
            values = grid(float(sweep["min"]), float(sweep["max"]), int(sweep["n"]),
                          bool(sweep.get("log", False)))
        except KeyError as e:
            raise ConfigError(f"sweep is missing '{e.args[0]}'", source=source,
                              key=e.args[0]) from None
    settings = data.get("settings", {})
    return SweepSpec(
        observable=data["observable"], values=values, sweep_var=sweep.get("var", "delta"),
        dk_mode=data.get("dk_mode", "resonant"), dk=float(data.get("dk", 0.0)),
        settings=[settings] if isinstance(settings, dict) else list(settings),
        series=list(data.get("series", [{}])), extras=dict(data.get("extras", {})),
    )


def load_recipe(path) -> SweepSpec:
    """Read a recipe JSON file"""
    source = str(path)
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(e.msg, source=source, line=e.lineno, column=e.colno) from None
    except OSError as e:
        raise ConfigError(f"cannot read recipe: {e.strerror}", source=source) from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object", source=source)
    return spec_from_mapping(data, source)
