"""Job orchestration and bit-exact artifact export.

A job is described by a JSON config and runs one of four modes:
``curve_report`` (closing-condition residuals and the plane curves),
``nil_surface`` / ``cmc_surface`` (additionally build and export the
mesh), and ``inverse_design`` (construct the potential from two closed
curve CSVs, then proceed like ``nil_surface``).

Exports are deterministic: identical configs produce byte-identical
CSV/OBJ/JSON artifacts.  Exit codes: 0 success, 2 config error,
3 numerical failure (report still written); a failed closing condition
in the surface modes only flags the output as frame-periodic.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .curves import PlaneCurve, alpha_of, ell_of, m_of
from .design import CurvePair, design
from .fourier import PeriodicFunction
from .frames import closing_report, integrate_frame
from .iwasawa import frame_from
from .potentials import (FrameData, PotentialData, PRESET_NAMES,
                         extract_nu_kappa, preset)
from .sym import (closure_residual, mean_curvature_field, surface_grid)

__all__ = ["JobConfig", "ConfigError", "run", "main",
           "export_csv", "export_obj", "export_report", "read_curve_csv"]

MODES = ("curve_report", "nil_surface", "cmc_surface", "inverse_design")

CSV_HEADER = "t,re_ell,im_ell,re_m,im_m,re_alpha,im_alpha"


class ConfigError(ValueError):
    pass


DEFAULT_GRID = {"x_samples": 256, "y_min": -0.25, "y_max": 0.25,
                "y_samples": 33}
DEFAULT_TOLERANCES = {"closing": 1e-8, "iwasawa": 1e-8, "closure": 1e-5}


@dataclass
class JobConfig:
    mode: str
    potential: dict = field(default_factory=dict)
    curves: dict = field(default_factory=dict)
    n: int = 1
    truncation: int = 16
    rk_steps_per_period: int = 2048
    grid: dict = field(default_factory=lambda: dict(DEFAULT_GRID))
    lam_angle: float = 0.0
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    outputs: dict = field(default_factory=dict)

    _KEYS = {"mode", "potential", "curves", "n", "truncation",
             "rk_steps_per_period", "grid", "lambda", "tolerances",
             "outputs"}

    @classmethod
    def from_dict(cls, raw, out_dir=None):
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(raw) - cls._KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        mode = raw.get("mode")
        if mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
        cfg = cls(mode=mode)
        cfg.potential = dict(raw.get("potential", {}))
        cfg.curves = dict(raw.get("curves", {}))
        cfg.n = int(raw.get("n", 1))
        cfg.truncation = int(raw.get("truncation", 16))
        cfg.rk_steps_per_period = int(raw.get("rk_steps_per_period", 2048))
        cfg.grid = {**DEFAULT_GRID, **raw.get("grid", {})}
        cfg.lam_angle = float(raw.get("lambda", 0.0))
        cfg.tolerances = {**DEFAULT_TOLERANCES,
                          **raw.get("tolerances", {})}
        cfg.outputs = dict(raw.get("outputs", {}))
        if out_dir is not None:
            cfg.outputs.setdefault("curves_csv",
                                   os.path.join(out_dir, "curves.csv"))
            cfg.outputs.setdefault("report_json",
                                   os.path.join(out_dir, "report.json"))
            cfg.outputs.setdefault("mesh_obj",
                                   os.path.join(out_dir, "mesh.obj"))
        cfg.validate()
        return cfg

    def validate(self):
        if self.n < 1:
            raise ConfigError("cover index n must be >= 1")
        if self.truncation < 4:
            raise ConfigError("truncation order must be >= 4")
        if self.rk_steps_per_period < 8:
            raise ConfigError("rk_steps_per_period must be >= 8")
        g = self.grid
        if g["x_samples"] < 2 or g["y_samples"] < 1:
            raise ConfigError("grid needs x_samples >= 2 and y_samples >= 1")
        if not g["y_min"] <= g["y_max"]:
            raise ConfigError("grid needs y_min <= y_max")
        for key, val in self.tolerances.items():
            if val <= 0:
                raise ConfigError(f"tolerance {key} must be positive")
        if self.mode == "inverse_design":
            for key in ("ell_csv", "m_csv"):
                if key not in self.curves:
                    raise ConfigError(f"inverse_design needs curves.{key}")
        elif not self.potential:
            raise ConfigError("potential section is required")

    @property
    def lam(self):
        return complex(np.exp(1j * self.lam_angle))

    def echo(self):
        return {"mode": self.mode, "potential": self.potential,
                "curves": self.curves, "n": self.n,
                "truncation": self.truncation,
                "rk_steps_per_period": self.rk_steps_per_period,
                "grid": self.grid, "lambda": self.lam_angle,
                "tolerances": self.tolerances, "outputs": self.outputs}


# ----------------------------------------------------------------------
# ingest
# ----------------------------------------------------------------------

def _function_from_spec(spec, period):
    """PeriodicFunction from {coeffs: [[re, im], ...]} or sample files."""
    if "coeffs" in spec:
        pairs = np.asarray(spec["coeffs"], dtype=float)
        if pairs.ndim != 2 or pairs.shape[1] != 2 or pairs.shape[0] % 2 == 0:
            raise ConfigError(
                "coeffs must be an odd-length list of [re, im] pairs "
                "ordered from degree -K to K")
        return PeriodicFunction(period, pairs[:, 0] + 1j * pairs[:, 1])
    if "samples" in spec:
        pairs = np.asarray(spec["samples"], dtype=float)
        return PeriodicFunction.from_samples(pairs[:, 0] + 1j * pairs[:, 1],
                                             period)
    if "samples_csv" in spec:
        ts, vals = read_curve_csv(spec["samples_csv"])
        return PeriodicFunction.from_samples(vals, period)
    raise ConfigError(
        "function spec needs one of: coeffs, samples, samples_csv")


def resolve_potential(cfg: JobConfig):
    """(FrameData, PotentialData) from the config's potential section."""
    spec = cfg.potential
    if "preset" in spec:
        name = spec["preset"]
        if name not in PRESET_NAMES:
            raise ConfigError(
                f"unknown preset {name!r}; choose from {sorted(PRESET_NAMES)}")
        return preset(name, period_multiplier=spec.get("period_multiplier", 1))
    try:
        period = float(spec["period"])
    except KeyError:
        raise ConfigError("custom potential needs a period") from None
    if "h" not in spec:
        raise ConfigError("custom potential needs h")
    h = _function_from_spec(spec["h"], period)
    if "a0" in spec or "b0" in spec:
        if not ("a0" in spec and "b0" in spec):
            raise ConfigError("custom potential needs both a0 and b0")
        frame_period = float(spec.get("frame_period", period))
        a0 = _function_from_spec(spec["a0"], frame_period)
        b0 = _function_from_spec(spec["b0"], frame_period)
        frame = FrameData.from_functions(a0, b0, frame_period, tol=1e-8)
    else:
        one = PeriodicFunction.constant(1.0, period)
        zero = PeriodicFunction.zero(period)
        frame = FrameData.from_functions(one, zero, period)
    nu, kappa = extract_nu_kappa(frame)
    pot = PotentialData(nu.match_period(period), kappa.match_period(period),
                        h, period)
    return frame, pot


def read_curve_csv(path, which=None):
    """Read (t, values) from a curve CSV.

    Accepts the plain three-column format t, re, im as well as the
    exported seven-column curves.csv (pass which = 'ell', 'm' or
    'alpha' to select; defaults to 'ell').
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ConfigError(f"empty curve file {path}")
    header = lines[0].lower().replace(" ", "")
    rows = lines
    cols = (1, 2)
    if header.startswith("t,"):
        rows = lines[1:]
        names = header.split(",")
        if len(names) >= 7 and "re_ell" in names:
            sel = which or "ell"
            cols = (names.index(f"re_{sel}"), names.index(f"im_{sel}"))
    data = np.array([[float(x) for x in ln.split(",")] for ln in rows])
    ts = data[:, 0]
    vals = data[:, cols[0]] + 1j * data[:, cols[1]]
    dt = np.diff(ts)
    if ts[0] != 0.0 or dt.size == 0 or not np.allclose(dt, dt[0], rtol=1e-9):
        raise ConfigError(
            f"curve file {path} must sample t = 0, dt, ..., p-dt equispaced")
    return ts, vals


def _curve_from_csv(path, which=None):
    ts, vals = read_curve_csv(path, which)
    period = ts[-1] + (ts[1] - ts[0])
    series = PeriodicFunction.from_samples(vals, period)
    return PlaneCurve(series=series, secular_slope=0.0, period=period)


# ----------------------------------------------------------------------
# exports
# ----------------------------------------------------------------------

def _g17(x):
    return f"{x:.17g}"


def export_csv(path, ts, ell_vals, m_vals, alpha_vals):
    lines = [CSV_HEADER]
    for t, e, m, a in zip(ts, ell_vals, m_vals, alpha_vals):
        lines.append(",".join(_g17(v) for v in
                              (t, e.real, e.imag, m.real, m.imag,
                               a.real, a.imag)))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def export_obj(path, mesh):
    """Wavefront OBJ: one v-line per grid vertex, quads over valid blocks.

    Invalid vertices are written as the origin; they are never
    referenced since faces touching them are omitted.
    """
    ny, nx = mesh.shape
    lines = []
    verts = np.where(mesh.valid[..., None], mesh.vertices, 0.0)
    for iy in range(ny):
        for ix in range(nx):
            x, y, z = verts[iy, ix]
            lines.append(f"v {_g17(x)} {_g17(y)} {_g17(z)}")
    for quad in mesh.quad_faces():
        lines.append("f " + " ".join(str(i) for i in quad))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _jsonable(value):
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def export_report(path, report_dict):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(report_dict), fh, sort_keys=True, indent=1,
                  allow_nan=False, default=str)
        fh.write("\n")


def _flatten_closing(rep):
    out = {
        "mode": rep.mode, "n": rep.n,
        "monodromy_residual_at_1": rep.monodromy_residual_at_1,
        "monodromy_sign": rep.monodromy_sign,
        "second_residual_re": rep.second_residual.real,
        "second_residual_im": rep.second_residual.imag,
        "third_lhs": rep.third_lhs, "third_rhs": rep.third_rhs,
        "area_ell": rep.area_ell, "area_m": rep.area_m,
        "x_off_at_1": rep.x_off_at_1, "y_diag_at_1": rep.y_diag_at_1,
        "x_full_at_1": rep.x_full_at_1,
        "dual_x_delta": rep.dual_x_delta, "dual_y_delta": rep.dual_y_delta,
        "cmc_alpha_residual_re": rep.cmc_alpha_residual.real,
        "cmc_alpha_residual_im": rep.cmc_alpha_residual.imag,
        "cmc_beta_residual": rep.cmc_beta_residual,
        "reality_residual": rep.reality_residual,
    }
    for key, val in rep.tolerances.items():
        out[f"tol_{key}"] = val
    for key, val in rep.passes.items():
        out[f"pass_{key}"] = bool(val)
    return {k: (v if not isinstance(v, float) or np.isfinite(v) else None)
            for k, v in out.items()}


# ----------------------------------------------------------------------
# the pipeline
# ----------------------------------------------------------------------

def run(cfg: JobConfig) -> int:
    """Execute a job; returns the process exit status."""
    if cfg.mode == "inverse_design":
        ell_t = _curve_from_csv(cfg.curves["ell_csv"], "ell")
        m_t = _curve_from_csv(cfg.curves["m_csv"], "m")
        if not np.isclose(ell_t.period, m_t.period, rtol=1e-9):
            raise ConfigError("curve files must share the period")
        pair = CurvePair(ell_t, m_t, ell_t.period)
        frame, pot = design(pair)
    else:
        frame, pot = resolve_potential(cfg)

    mode = "cmc_L3" if cfg.mode == "cmc_surface" else "nil_cylinder"
    rep = closing_report(frame, pot, n=cfg.n, mode=mode,
                         order=cfg.truncation,
                         steps_per_period=cfg.rk_steps_per_period,
                         tol_closing=cfg.tolerances["closing"])
    report = _flatten_closing(rep)
    report["config"] = cfg.echo()
    report["version"] = __version__
    report["tail_alpha"] = alpha_of(frame, pot).tail_norm()
    report["tail_h"] = pot.h.tail_norm()

    alpha = alpha_of(frame, pot)
    ell = ell_of(alpha)
    m = m_of(frame, period=pot.period)
    length = cfg.n * pot.period
    ts = np.arange(cfg.grid["x_samples"]) * (length / cfg.grid["x_samples"])
    export_csv(cfg.outputs["curves_csv"], ts, ell.at(ts),
               m.at(ts % pot.period), alpha(ts % pot.period))

    status = 0
    if cfg.mode in ("nil_surface", "cmc_surface", "inverse_design"):
        if not rep.all_pass:
            report["frame_periodic_only"] = True
            print("warning: closing conditions not met; "
                  "emitting frame-periodic surface", file=sys.stderr)
        else:
            report["frame_periodic_only"] = False
        g = cfg.grid
        field = integrate_frame(
            pot, length, g["x_samples"], g["y_min"], g["y_max"],
            g["y_samples"], order=cfg.truncation,
            steps_per_period=cfg.rk_steps_per_period, lam=cfg.lam)
        iwa = frame_from(field, tol=cfg.tolerances["iwasawa"])
        target = "L3" if cfg.mode == "cmc_surface" else "nil"
        mesh = surface_grid(field, iwa, target=target)
        export_obj(cfg.outputs["mesh_obj"], mesh)
        report["valid_vertices"] = int(mesh.valid.sum())
        report["total_vertices"] = int(mesh.valid.size)
        report["closure_residual"] = closure_residual(mesh)
        report["closure_pass"] = bool(
            np.isfinite(report["closure_residual"])
            and report["closure_residual"] <= cfg.tolerances["closure"])
        report["su11_residual"] = mesh.su11_residual
        report["det_gauss_residual"] = mesh.det_gauss_residual
        report["iwasawa_max_reconstruction"] = float(
            np.nanmax(iwa.rec_residual)) if mesh.valid.any() else None
        report["iwasawa_max_reality"] = float(
            np.nanmax(iwa.real_residual)) if mesh.valid.any() else None
        report["integration_tail"] = field.tail
        if target == "L3" and mesh.valid.any():
            H, mask = mean_curvature_field(mesh)
            if mask.any():
                vals = H[mask]
                med = float(np.median(vals))
                report["mean_curvature_median"] = med
                report["mean_curvature_spread"] = (
                    float((vals.max() - vals.min()) / abs(med))
                    if med else None)
        if not mesh.valid.any():
            status = 3
    export_report(cfg.outputs["report_json"], report)
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nilcyl",
        description="Minimal cylinders in the Heisenberg group and "
                    "spacelike CMC cylinders via the loop group method")
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", required=True, help="JSON job config")
    parser.add_argument("--lambda", dest="lam_angle", type=float,
                        default=None,
                        help="angle theta with lambda = exp(i theta)")
    parser.add_argument("--n-modes", dest="truncation", type=int,
                        default=None, help="Laurent truncation order")
    parser.add_argument("--out", default=".",
                        help="directory for default artifact paths")
    args = parser.parse_args(argv)
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        raw["mode"] = args.mode
        if args.lam_angle is not None:
            raw["lambda"] = args.lam_angle
        if args.truncation is not None:
            raw["truncation"] = args.truncation
        os.makedirs(args.out, exist_ok=True)
        cfg = JobConfig.from_dict(raw, out_dir=args.out)
    except (ConfigError, OSError, json.JSONDecodeError, KeyError,
            TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
