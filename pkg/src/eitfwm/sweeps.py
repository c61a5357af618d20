"""Parameter sweeps, dip reports, and deterministic result emission.

Per-point work is delegated to the covariance assembly; this module owns
grid construction (with automatic refinement near the pair detunings),
ordered concurrent evaluation, dip/plateau summaries, and the CSV/JSON
writers.  Everything here is deterministic: rerunning a sweep with the
same configuration reproduces the output byte for byte, and concurrent
evaluation returns results in grid order regardless of thread count.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .params import PhysicalParams, derive
from .steady_state import steady_state
from . import langevin
from . import propagation
from . import entanglement

__version__ = "0.1.0"

#: pairs reported for the single-pair and two-pair configurations
SINGLE_PAIRS = (("a1", "b1"), ("a1", "S"), ("S", "b1"))
TWO_PAIR_PAIRS = (("a1", "a2"), ("b1", "b2"), ("a1", "S"), ("S", "b1"))

#: plateau statistics are taken over this band unless overridden
PLATEAU_BAND = (-2600.0, 600.0)


@dataclass
class SweepConfig:
    """Model-level switches shared by every sweep experiment."""

    coupling: str = "parametric"
    sideband: str = "mirrored"
    spinwave: entanglement.SpinWaveMode = entanglement.SpinWaveMode()
    two_pair: bool = False
    threads: int = 1

    def modes(self, p: PhysicalParams):
        if self.two_pair:
            return propagation.two_pair_modes(p)
        return propagation.single_pair_modes(p)

    def pairs(self):
        return list(TWO_PAIR_PAIRS if self.two_pair else SINGLE_PAIRS)


@dataclass
class CorrelationSpectrum:
    """Witness values of every reported pair on a frequency grid."""

    omegas: np.ndarray
    pairs: list
    values: dict            # pair -> array of V
    signs: dict             # pair -> list of (sign_u, sign_v)
    params: PhysicalParams
    config: SweepConfig
    axis: str = "omega"     # sweep variable of ``omegas``

    @property
    def params_hash(self) -> str:
        return params_hash(self.params, self.config)


@dataclass
class DipReport:
    """Location and shape summary of one spectral feature.

    ``degenerate`` is None for a genuine interior minimum, "edge" when
    the windowed minimum sits on the window boundary (monotone or bump
    shaped data), "flat" when the window shows no structure above float
    noise.  The full width is measured at half depth below the plateau
    median and is NaN when the half-depth contour is not crossed inside
    the window.
    """

    pair: tuple
    omega_star: float
    v_min: float
    plateau_median: float
    width: float
    window: tuple
    degenerate: str | None = None


def params_hash(p: PhysicalParams, config: SweepConfig) -> str:
    payload = dataclasses.asdict(p)
    payload["coupling"] = config.coupling
    payload["sideband"] = config.sideband
    payload["spinwave_definition"] = config.spinwave.definition
    payload["spinwave_scale_override"] = config.spinwave.scale
    payload["two_pair"] = config.two_pair
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def omega_grid(start: float, stop: float, n: int,
               refine_centers=(), refine_step: float | None = None,
               refine_halfwidth: float = 30.0,
               p: PhysicalParams | None = None) -> np.ndarray:
    """Uniform grid with dense patches inserted around given centers.

    The refinement step defaults to a third of the optical linewidth, so
    features of that scale cannot fall between grid points.
    """
    base = np.linspace(start, stop, n)
    if refine_step is None:
        dp = derive(p if p is not None else PhysicalParams())
        refine_step = dp.gamma13 / 3.0
    patches = [base]
    for c in refine_centers:
        lo = max(start, c - refine_halfwidth)
        hi = min(stop, c + refine_halfwidth)
        if hi > lo:
            count = int(np.ceil((hi - lo) / refine_step)) + 1
            patches.append(np.linspace(lo, hi, count))
    return np.unique(np.concatenate(patches))


def _evaluate_point(args):
    (om, p, ss, two_d, modes, config, dp) = args
    try:
        ext = entanglement.covariance_with_spinwave(
            om, p, ss, two_d, modes=modes, coupling=config.coupling,
            sideband=config.sideband, spinwave=config.spinwave, dp=dp)
    except propagation.NumericalOverflowError as exc:
        raise propagation.NumericalOverflowError(
            f"{exc} at omega = {om:g} MHz") from exc
    out = {}
    for pair in config.pairs():
        w = ext.duan(*pair)
        out[pair] = (w.value, w.signs)
    return out


def sweep_omega(p: PhysicalParams, omegas, config: SweepConfig | None = None
                ) -> CorrelationSpectrum:
    """Evaluate every configured pair witness across the frequency grid.

    A numerical overflow in the propagation is re-raised with the
    offending frequency attached; partial results are discarded so a
    failed sweep can never emit a truncated file.
    """
    if config is None:
        config = SweepConfig()
    omegas = np.asarray(omegas, dtype=float)
    ss = steady_state(p)
    two_d = langevin.diffusion_matrix(p, ss)
    dp = derive(p)
    modes = config.modes(p)
    jobs = [(om, p, ss, two_d, modes, config, dp) for om in omegas]
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            rows = list(pool.map(_evaluate_point, jobs))
    else:
        rows = [_evaluate_point(j) for j in jobs]
    pairs = config.pairs()
    values = {pair: np.array([r[pair][0] for r in rows]) for pair in pairs}
    signs = {pair: [r[pair][1] for r in rows] for pair in pairs}
    return CorrelationSpectrum(omegas=omegas, pairs=pairs, values=values,
                               signs=signs, params=p, config=config)


def sweep_gamma0(p: PhysicalParams, gamma0s, omega: float = 0.0,
                 config: SweepConfig | None = None) -> CorrelationSpectrum:
    """Witnesses at fixed frequency while the ground-coherence dephasing
    varies; steady state, diffusion table, and the coherence response
    denominator are all recomputed at every point."""
    if config is None:
        config = SweepConfig()
    gamma0s = np.asarray(gamma0s, dtype=float)
    pairs = config.pairs()
    values = {pair: [] for pair in pairs}
    signs = {pair: [] for pair in pairs}
    for g0 in gamma0s:
        pg = p.with_(gamma0=float(g0))
        ss = steady_state(pg)
        two_d = langevin.diffusion_matrix(pg, ss)
        row = _evaluate_point((omega, pg, ss, two_d, config.modes(pg),
                               config, derive(pg)))
        for pair in pairs:
            values[pair].append(row[pair][0])
            signs[pair].append(row[pair][1])
    return CorrelationSpectrum(
        omegas=gamma0s, pairs=pairs,
        values={k: np.array(v) for k, v in values.items()},
        signs=signs, params=p, config=config, axis="gamma0")


def sweep_alpha(p: PhysicalParams, alphas, omega: float,
                config: SweepConfig | None = None) -> CorrelationSpectrum:
    """Witnesses versus the coherent input amplitude.

    The fluctuation dynamics never sees the displacement, so the values
    are constant in exact arithmetic; the sweep exists to demonstrate
    that, not to explore anything.
    """
    if config is None:
        config = SweepConfig()
    alphas = np.asarray(alphas, dtype=float)
    pairs = config.pairs()
    values = {pair: [] for pair in pairs}
    signs = {pair: [] for pair in pairs}
    for a in alphas:
        pa = p.with_(alpha1=float(a))
        ss = steady_state(pa)
        two_d = langevin.diffusion_matrix(pa, ss)
        row = _evaluate_point((omega, pa, ss, two_d, config.modes(pa),
                               config, derive(pa)))
        for pair in pairs:
            values[pair].append(row[pair][0])
            signs[pair].append(row[pair][1])
    return CorrelationSpectrum(
        omegas=alphas, pairs=pairs,
        values={k: np.array(v) for k, v in values.items()},
        signs=signs, params=p, config=config, axis="alpha")


def plateau_median(spec: CorrelationSpectrum, pair, band=PLATEAU_BAND,
                   exclude=()) -> float:
    """Median witness over the plateau band, excluding given intervals."""
    mask = (spec.omegas >= band[0]) & (spec.omegas <= band[1])
    for lo, hi in exclude:
        mask &= ~((spec.omegas >= lo) & (spec.omegas <= hi))
    if not np.any(mask):
        return float("nan")
    return float(np.median(spec.values[pair][mask]))


def find_dip(spec: CorrelationSpectrum, pair, window,
             plateau_band=PLATEAU_BAND) -> DipReport:
    """Windowed minimum of one pair's witness with shape diagnostics.

    The plateau median is refined once: a provisional width taken from
    the first pass excludes three half-widths around the minimum from
    the final plateau estimate.
    """
    om = spec.omegas
    v = spec.values[pair]
    sel = np.flatnonzero((om >= window[0]) & (om <= window[1]))
    if sel.size == 0:
        raise ValueError(f"window {window} contains no grid points")
    vw = v[sel]
    k = int(np.argmin(vw))
    omega_star = float(om[sel[k]])
    v_min = float(vw[k])

    span = float(np.max(vw) - np.min(vw))
    scale = max(abs(float(np.max(vw))), 1.0)
    if span <= 1e-12 * scale:
        med = plateau_median(spec, pair, plateau_band)
        return DipReport(pair=pair, omega_star=omega_star, v_min=med,
                         plateau_median=med, width=float("nan"),
                         window=tuple(window), degenerate="flat")
    if k == 0 or k == vw.size - 1:
        med = plateau_median(spec, pair, plateau_band)
        return DipReport(pair=pair, omega_star=omega_star, v_min=v_min,
                         plateau_median=med, width=float("nan"),
                         window=tuple(window), degenerate="edge")

    def half_width(med):
        target = v_min + 0.5 * (med - v_min)
        left = right = float("nan")
        for i in range(k, 0, -1):
            if vw[i - 1] >= target:
                # linear interpolation between the bracketing points
                f = (target - vw[i]) / (vw[i - 1] - vw[i])
                left = om[sel[i]] + f * (om[sel[i - 1]] - om[sel[i]])
                break
        for i in range(k, vw.size - 1):
            if vw[i + 1] >= target:
                f = (target - vw[i]) / (vw[i + 1] - vw[i])
                right = om[sel[i]] + f * (om[sel[i + 1]] - om[sel[i]])
                break
        return right - left

    med = plateau_median(spec, pair, plateau_band)
    w = half_width(med)
    if np.isfinite(w):
        med = plateau_median(spec, pair, plateau_band,
                             exclude=[(omega_star - 3 * w, omega_star + 3 * w)])
        w = half_width(med)
    return DipReport(pair=pair, omega_star=omega_star, v_min=v_min,
                     plateau_median=med, width=float(w),
                     window=tuple(window), degenerate=None)


# --- default experiment grids -------------------------------------------

def fig_spectrum_grid(p: PhysicalParams, n: int = 2001) -> np.ndarray:
    return omega_grid(-3000.0, 1000.0, n, refine_centers=(p.delta1,), p=p)


def fig_two_pair_grid(p: PhysicalParams, n: int = 2001) -> np.ndarray:
    return omega_grid(-3000.0, 3000.0, n,
                      refine_centers=(p.delta1, p.delta2), p=p)


def fig_gamma0_grid(n: int = 101) -> np.ndarray:
    return np.logspace(-2.0, 3.0, n)


def fig_alpha_grid(n: int = 101) -> np.ndarray:
    return np.linspace(0.0, 1000.0, n)


# --- emission -------------------------------------------------------------

def _pair_tag(pair) -> str:
    return f"{pair[0]}_{pair[1]}"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def csv_lines(spec: CorrelationSpectrum, extra_meta: dict | None = None):
    """Deterministic CSV serialization: '#' metadata, header, 17-digit rows."""
    p = spec.params
    meta = {
        "version": __version__,
        "params_hash": spec.params_hash,
        "axis": spec.axis,
        "coupling": spec.config.coupling,
        "sideband": spec.config.sideband,
        "spinwave_definition": spec.config.spinwave.definition,
        "coupling_scale": _fmt(p.coupling_scale),
        "spinwave_scale": _fmt(spec.config.spinwave.resolve_scale(p)),
    }
    if extra_meta:
        meta.update(extra_meta)
    lines = [f"# {k} = {v}" for k, v in meta.items()]
    cols = [spec.axis]
    for pair in spec.pairs:
        t = _pair_tag(pair)
        cols += [f"V_{t}", f"su_{t}", f"sv_{t}"]
    lines.append(",".join(cols))
    for i, x in enumerate(spec.omegas):
        row = [_fmt(x)]
        for pair in spec.pairs:
            su, sv = spec.signs[pair][i]
            row += [_fmt(spec.values[pair][i]), str(int(su)), str(int(sv))]
        lines.append(",".join(row))
    return lines


def write_csv(spec: CorrelationSpectrum, path: str,
              extra_meta: dict | None = None) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(csv_lines(spec, extra_meta)) + "\n")


def summary_payload(spec: CorrelationSpectrum, dips=(),
                    calibration: dict | None = None,
                    include_curves: bool = True) -> dict:
    p = spec.params
    dp = derive(p)
    payload = {
        "version": __version__,
        "params": dataclasses.asdict(p),
        "derived": dataclasses.asdict(dp),
        "config": {
            "coupling": spec.config.coupling,
            "sideband": spec.config.sideband,
            "spinwave_definition": spec.config.spinwave.definition,
            "spinwave_scale": spec.config.spinwave.resolve_scale(p),
            "two_pair": spec.config.two_pair,
            "params_hash": spec.params_hash,
        },
        "axis": spec.axis,
        "dips": [dataclasses.asdict(d) for d in dips],
        "signs": {_pair_tag(pair): spec.signs[pair][0]
                  for pair in spec.pairs},
        "calibration": calibration or {},
    }
    if include_curves:
        payload["curves"] = {
            spec.axis: [float(x) for x in spec.omegas],
            **{_pair_tag(pair): [float(v) for v in spec.values[pair]]
               for pair in spec.pairs},
        }
    return payload


def write_json(payload: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
