"""``berryoptics`` command-line interface.

Every command resolves a configuration (built-in defaults, then an optional
JSON file given with ``--config``, then explicit flags), runs, and emits a
JSON summary plus CSV tables. With ``--out DIR`` the files are written to
``DIR/<command>.json`` and ``DIR/<command>_<table>.csv``; otherwise the
summary goes to stdout.

Outputs embed the resolved configuration, its SHA-256 and the toolkit
version, and contain no timestamps or timings, so identical inputs give
byte-identical files.

Exit codes: 0 success, 2 configuration/validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import __version__, _backend
from .circuit import circuit_path, winding_sum, windings_for_convergence
from .dynamics import (
    Frame,
    extract_total_phase,
    perturbative_phase,
    simulate_two_zone,
    solve_two_level,
    wkb_phase,
)
from .errors import ConfigError, DomainError, NumericalError
from .model import (
    Envelope,
    EnvelopeKind,
    PhysicalSetup,
    ZoneParameters,
    argon_setup,
    to_dimensionless,
    validity_report,
)
from .phases import (
    PhaseResult,
    closed_form_phases,
    quadrature_phases,
    weak_field_result,
)
from .wavepacket import (
    GaussianPacket,
    analytic_width,
    figure_curves,
    focus_full_profile,
    make_grid,
    measure_width,
    min_width,
    propagate_free,
    sample_gaussian,
)

SCHEMA_VERSION = 1
COMMANDS = ("phases", "dynamics", "windings", "packet", "sweep", "validate", "circuit")
SWEEP_BUDGET = 1_000_000
PHASE_METHODS = ("quadrature", "closed_form", "weak_field")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

_ZONE_DEFAULT = {
    "delta_tau": 10.0,
    "omega_alpha_tau": 1.0,
    "a": 1.0,
    "envelope": {"kind": "eckart", "half_window": 40.0},
}

DEFAULTS: dict[str, dict] = {
    "phases": {"zone": _ZONE_DEFAULT, "methods": ["quadrature", "closed_form"], "tol": 1e-12},
    "dynamics": {
        "zone": {**_ZONE_DEFAULT, "delta_tau": 40.0, "omega_alpha_tau": 0.5, "a": 0.5},
        "frame": "tilde",
        "rtol": 1e-10,
        "atol": 1e-12,
        "n_samples": 801,
        "two_zone": False,
        "gap": 10.0,
    },
    "windings": {"a": 1.0, "omega_alpha_tau": 1.0, "n_windings": None},
    "packet": {
        "b": 5.0,
        "profile": "quadratic",
        "k_dx0": 0.05,
        "rabi_ratio": 1.8,
        "n_zones": 2,
        "t_max": 1.0,
        "n_times": 101,
    },
    "sweep": {
        "axes": {"a": [0.0, 0.5, 1.0], "omega_alpha_tau": [1.0], "delta_tau": [10.0]},
        "envelope": {"kind": "eckart", "half_window": 40.0},
        "methods": ["quadrature", "closed_form"],
        "tol": 1e-12,
    },
    "validate": {"setup": None, "x": None, "threshold": 10.0,
                 "envelope": {"kind": "eckart", "half_window": 40.0}},
    "circuit": {"zone": {**_ZONE_DEFAULT, "a": 1.0, "omega_alpha_tau": 4.0 * math.pi},
                "n_samples": 801, "half_window": 4.0},
}


# -- formatting -------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    if v is None:
        return ""
    return str(v)


def format_csv(header: list[str], rows) -> str:
    """Comma-separated table, full double precision, ``\\n`` line endings."""
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def config_hash(config: dict) -> str:
    canon = json.dumps(_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


# -- configuration -------------------------------------------------------------------------

def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load_config_file(path: str) -> dict:
    """Read a JSON config; syntax errors are reported with line and column."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or not doc:
        raise ConfigError(f"{path}: config must be a non-empty JSON object")
    if "schema_version" not in doc:
        raise ConfigError(f"{path}: missing field 'schema_version'")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(f"{path}: field 'schema_version': unsupported value {doc['schema_version']!r}")
    return doc


def resolve_config(command: str, file_doc: Optional[dict] = None,
                   overrides: Optional[dict] = None) -> dict:
    """Defaults < config file < flags; returns the full resolved configuration."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    cfg = copy.deepcopy(DEFAULTS[command])
    if file_doc:
        body = {k: v for k, v in file_doc.items() if k not in ("schema_version", "command")}
        if file_doc.get("command", command) != command:
            raise ConfigError(f"field 'command': config is for {file_doc['command']!r}, not {command!r}")
        unknown = set(body) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown field(s) for {command}: {', '.join(sorted(unknown))}")
        cfg = _merge(cfg, body)
    if overrides:
        cfg = _merge(cfg, overrides)
    cfg["schema_version"] = SCHEMA_VERSION
    cfg["command"] = command
    return cfg


def _positive(cfg: dict, key: str, where: str = "") -> float:
    try:
        v = float(cfg[key])
    except (TypeError, ValueError):
        raise ConfigError(f"field '{where}{key}': expected a number, got {cfg[key]!r}") from None
    if not v > 0 or not math.isfinite(v):
        raise ConfigError(f"field '{where}{key}': must be positive and finite, got {v}")
    return v


def _number(cfg: dict, key: str, where: str = "") -> float:
    try:
        v = float(cfg[key])
    except (TypeError, ValueError, KeyError):
        raise ConfigError(f"field '{where}{key}': expected a number") from None
    if not math.isfinite(v):
        raise ConfigError(f"field '{where}{key}': must be finite")
    return v


def parse_envelope(d: dict, where: str = "envelope") -> Envelope:
    if not isinstance(d, dict):
        raise ConfigError(f"field '{where}': expected an object")
    kind = str(d.get("kind", "eckart")).lower()
    if kind not in [k.name.lower() for k in EnvelopeKind]:
        raise ConfigError(f"field '{where}.kind': unsupported envelope {kind!r}")
    try:
        return Envelope.from_dict(d)
    except DomainError as exc:
        raise ConfigError(f"field '{where}': {exc}") from exc


def parse_zone(d: dict, where: str = "zone") -> ZoneParameters:
    if not isinstance(d, dict):
        raise ConfigError(f"field '{where}': expected an object")
    env = parse_envelope(d.get("envelope", {}), f"{where}.envelope")
    try:
        return ZoneParameters(_number(d, "delta_tau", where + "."),
                              _number(d, "omega_alpha_tau", where + "."),
                              _number(d, "a", where + "."), env)
    except DomainError as exc:
        raise ConfigError(f"field '{where}': {exc}") from exc


def parse_axis(value, name: str) -> list[float]:
    """Axis values from a list, ``"v1,v2,..."`` or ``"start:stop:num"`` / ``{"start","stop","num"}``."""
    if isinstance(value, str):
        if ":" in value:
            parts = value.split(":")
            if len(parts) != 3:
                raise ConfigError(f"axis '{name}': expected start:stop:num")
            value = {"start": parts[0], "stop": parts[1], "num": parts[2]}
        else:
            value = [s for s in value.split(",") if s.strip()]
    if isinstance(value, dict):
        try:
            start, stop, num = float(value["start"]), float(value["stop"]), int(value["num"])
        except (KeyError, ValueError, TypeError):
            raise ConfigError(f"axis '{name}': range needs numeric start, stop and integer num") from None
        if num < 1:
            raise ConfigError(f"axis '{name}': num must be at least 1")
        values = np.linspace(start, stop, num).tolist()
    elif isinstance(value, (list, tuple)):
        try:
            values = [float(v) for v in value]
        except (TypeError, ValueError):
            raise ConfigError(f"axis '{name}': values must be numbers") from None
    else:
        raise ConfigError(f"axis '{name}': expected a list or a range")
    if not values:
        raise ConfigError(f"axis '{name}' is empty")
    if not all(math.isfinite(v) for v in values):
        raise ConfigError(f"axis '{name}': values must be finite")
    return values


def _methods(cfg: dict) -> list[str]:
    methods = cfg["methods"]
    if isinstance(methods, str):
        methods = [m.strip() for m in methods.split(",") if m.strip()]
    aliases = {"closed": "closed_form", "weak": "weak_field", "quad": "quadrature"}
    out = [aliases.get(m, m) for m in methods]
    bad = [m for m in out if m not in PHASE_METHODS]
    if bad or not out:
        raise ConfigError(f"field 'methods': choose from {', '.join(PHASE_METHODS)}")
    return out


def _phase_by(method: str, zone: ZoneParameters, tol: float) -> PhaseResult:
    if method == "quadrature":
        return quadrature_phases(zone, tol)
    if method == "closed_form":
        return closed_form_phases(zone)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return weak_field_result(zone)


# -- commands -------------------------------------------------------------------------------
# each returns (summary dict, {table name: (header, rows)})

Tables = dict[str, tuple[list[str], list]]


def cmd_phases(cfg: dict) -> tuple[dict, Tables]:
    zone = parse_zone(cfg["zone"])
    tol = _positive(cfg, "tol")
    methods = _methods(cfg)
    if zone.envelope.kind != EnvelopeKind.ECKART and "closed_form" in methods:
        methods = [m for m in methods if m != "closed_form"]
    results = {m: _phase_by(m, zone, tol) for m in methods}
    first = results[methods[0]]
    header = ["method", "beta [rad]", "gamma [rad]", "phi_g [rad]", "phi_e [rad]", "est_error [rad]"]
    rows = [[m, r.beta, r.gamma, r.phi_g, r.phi_e, r.est_error] for m, r in results.items()]
    summary = {
        "zone": zone.to_dict(),
        "beta": first.beta,
        "gamma": first.gamma,
        "phi_g": first.phi_g,
        "phi_e": first.phi_e,
        "methods": {m: r.to_dict() for m, r in results.items()},
    }
    return summary, {"phases": (header, rows)}


def cmd_dynamics(cfg: dict) -> tuple[dict, Tables]:
    zone = parse_zone(cfg["zone"])
    rtol, atol = _positive(cfg, "rtol"), _positive(cfg, "atol")
    try:
        frame = Frame(str(cfg["frame"]).lower())
    except ValueError:
        raise ConfigError("field 'frame': expected 'lab' or 'tilde'") from None
    n = int(cfg["n_samples"])
    if n < 2:
        raise ConfigError("field 'n_samples': need at least 2")
    T = zone.envelope.half_window
    t_eval = np.linspace(-T, T, n)
    traj = solve_two_level(zone, frame, rtol, atol, t_eval=t_eval)
    pe, pg = traj.populations
    header = ["t [tau]", "re_amp_e", "im_amp_e", "re_amp_g", "im_amp_g",
              "pop_e", "pop_g", "phase_g_unwrapped [rad]"]
    rows = [list(r) for r in zip(traj.t, traj.amp_e.real, traj.amp_e.imag, traj.amp_g.real,
                                 traj.amp_g.imag, pe, pg, traj.phase_g)]
    summary: dict[str, Any] = {
        "zone": zone.to_dict(),
        "frame": frame.value,
        "backend": _backend.NAME,
        "final_pop_e": float(pe[-1]),
        "solver_stats": {"steps": traj.solver_stats.steps, "rejected": traj.solver_stats.rejected,
                         "max_norm_drift": traj.solver_stats.max_norm_drift},
    }
    summary["ode_phase"] = extract_total_phase(traj)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        w = wkb_phase(zone)
        p = perturbative_phase(zone)
    summary["wkb"] = {"phase": w.phase, "beta_part": w.beta_part, "gamma_part": w.gamma_part}
    summary["perturbative"] = {"phase": p.phase, "beta_part": p.beta_part, "gamma_part": p.gamma_part}
    if zone.envelope.kind == EnvelopeKind.ECKART:
        summary["closed_form"] = closed_form_phases(zone).to_dict()
    if cfg["two_zone"]:
        red = zone.replace(delta_tau=-zone.delta_tau)
        blue, red = (zone, red) if zone.delta_tau > 0 else (red, zone)
        gap = _number(cfg, "gap")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            run = simulate_two_zone(blue, red, gap, rtol, atol)
        summary["two_zone"] = {
            "gap": gap,
            "total_phase": run.result.phi_g,
            "expected_gamma_sum": run.expected,
            "residual": run.residual,
            "zone_phases": list(run.zone_phases),
            "warnings": [str(c.message) for c in caught],
        }
    return summary, {"trajectory": (header, rows)}


def cmd_windings(cfg: dict) -> tuple[dict, Tables]:
    a = _number(cfg, "a")
    w = _positive(cfg, "omega_alpha_tau")
    if a < 0:
        raise ConfigError("field 'a': must be non-negative")
    N = cfg["n_windings"]
    N = windings_for_convergence(w) if N is None else int(N)
    if N < 1:
        raise ConfigError("field 'n_windings': need at least 1")
    if N > SWEEP_BUDGET:
        raise ConfigError(f"field 'n_windings': exceeds budget {SWEEP_BUDGET}")
    res = winding_sum(N, a, w)
    partial = np.cumsum(res.terms)
    header = ["m", "gamma_m [rad]", "partial_sum [rad]"]
    rows = [[m + 1, g, s] for m, (g, s) in enumerate(zip(res.terms, partial))]
    summary = {"a": a, "omega_alpha_tau": w, "n_windings": N, "partial": res.partial,
               "telescoped": res.telescoped, "limit": res.limit,
               "remainder": res.limit - res.partial}
    return summary, {"windings": (header, rows)}


def cmd_packet(cfg: dict) -> tuple[dict, Tables]:
    b = _number(cfg, "b")
    t_max = _positive(cfg, "t_max")
    n = int(cfg["n_times"])
    if n < 2:
        raise ConfigError("field 'n_times': need at least 2")
    profile = str(cfg["profile"]).lower()
    if profile not in ("quadratic", "full"):
        raise ConfigError("field 'profile': expected 'quadratic' or 'full'")
    curves = figure_curves(b, t_max, n)
    t = curves["t"]
    packet = GaussianPacket(b=b)
    if profile == "quadratic":
        x = make_grid(b=b, t_max=t_max)
        psi0 = sample_gaussian(x, b)
        numeric = np.array([measure_width(propagate_free(psi0, ti)) for ti in t])
        focus = None
    else:
        n_zones = int(cfg["n_zones"])
        run = focus_full_profile(_positive(cfg, "k_dx0"), _positive(cfg, "rabi_ratio"), b,
                                 n_zones, times=t)
        numeric = run.widths
        focus = {"width_at_t_min": run.width_at_t_min, "relative_deviation": run.relative_deviation}
    dx_min, t_min = min_width(packet)
    header = ["t [t_s]", "ground [dx0]", "excited [dx0]", "free [dx0]", "numeric [dx0]"]
    rows = [list(r) for r in zip(t, curves["ground"], curves["excited"], curves["free"], numeric)]
    summary = {"b": b, "profile": profile, "dx_min": dx_min, "t_min": t_min,
               "width_at_t_min": analytic_width(t_min, packet),
               "max_rel_deviation": float(np.max(np.abs(numeric / curves["ground"] - 1.0))),
               "full_profile": focus}
    return summary, {"widths": (header, rows)}


def _sweep_row(point, envelope, methods, tol):
    a, w, d = point
    zone = ZoneParameters(d, w, a, envelope)
    row = [a, w, d]
    vals = []
    for m in methods:
        r = _phase_by(m, zone, tol)
        row += [r.beta, r.gamma, r.phi_g]
        vals.append((r.beta, r.gamma))
    if len(vals) > 1:
        diff = max(max(abs(v[0] - vals[0][0]), abs(v[1] - vals[0][1])) for v in vals[1:])
        row.append(diff)
    return row


def sweep_threads() -> int:
    raw = os.environ.get("BERRYOPTICS_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"BERRYOPTICS_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("BERRYOPTICS_THREADS must be at least 1")
    return n


def cmd_sweep(cfg: dict) -> tuple[dict, Tables]:
    axes = cfg["axes"]
    if not isinstance(axes, dict):
        raise ConfigError("field 'axes': expected an object")
    names = ("a", "omega_alpha_tau", "delta_tau")
    unknown = set(axes) - set(names)
    if unknown:
        raise ConfigError(f"field 'axes': unknown axis {sorted(unknown)[0]!r}")
    values = [parse_axis(axes[k], k) for k in names]
    total = math.prod(len(v) for v in values)
    if total > SWEEP_BUDGET:
        raise ConfigError(f"sweep has {total} points, budget is {SWEEP_BUDGET}")
    env = parse_envelope(cfg["envelope"])
    methods = _methods(cfg)
    if "closed_form" in methods and env.kind != EnvelopeKind.ECKART:
        raise ConfigError("field 'methods': closed_form needs the eckart envelope")
    tol = _positive(cfg, "tol")
    for a in values[0]:
        if a < 0:
            raise ConfigError("axis 'a': values must be non-negative")
    for w in values[1]:
        if w < 0:
            raise ConfigError("axis 'omega_alpha_tau': values must be non-negative")
    if any(d == 0 for d in values[2]):
        raise ConfigError("axis 'delta_tau': values must be nonzero")
    # lexicographic order in (a, omega_alpha_tau, delta_tau)
    points = [(a, w, d) for a in values[0] for w in values[1] for d in values[2]]
    job = lambda p: _sweep_row(p, env, methods, tol)  # noqa: E731
    threads = min(sweep_threads(), len(points))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(job, points))
    else:
        rows = [job(p) for p in points]
    header = ["a", "omega_alpha_tau", "delta_tau"]
    for m in methods:
        header += [f"{m}_beta [rad]", f"{m}_gamma [rad]", f"{m}_phi_g [rad]"]
    if len(methods) > 1:
        header.append("max_abs_diff [rad]")
    summary = {"n_points": len(rows), "methods": methods}
    if len(methods) > 1:
        summary["max_abs_diff"] = max(r[-1] for r in rows)
    return summary, {"sweep": (header, rows)}


def cmd_validate(cfg: dict) -> tuple[dict, Tables]:
    env = parse_envelope(cfg["envelope"])
    threshold = _positive(cfg, "threshold")
    if cfg["setup"] is None:
        setup = argon_setup()
        label = "argon"
    else:
        d = cfg["setup"]
        if not isinstance(d, dict):
            raise ConfigError("field 'setup': expected an object")
        try:
            setup = PhysicalSetup(**d)
        except TypeError as exc:
            raise ConfigError(f"field 'setup': {exc}") from exc
        except DomainError as exc:
            raise ConfigError(f"field 'setup': {exc}") from exc
        label = "custom"
    report = validity_report(setup, env, threshold)
    summary = {
        "setup_label": label,
        "setup": {k: getattr(setup, k) for k in setup.__dataclass_fields__},
        "doppler": setup.doppler,
        "omega_alpha_over_delta": setup.doppler / abs(setup.detuning),
        "validity": report.to_dict(),
    }
    if cfg["x"] is not None:
        zone = to_dimensionless(setup, _number(cfg, "x"), env)
        summary["zone"] = zone.to_dict()
        summary["phases"] = quadrature_phases(zone).to_dict()
    return summary, {}


def cmd_circuit(cfg: dict) -> tuple[dict, Tables]:
    zone = parse_zone(cfg["zone"])
    n = int(cfg["n_samples"])
    if n < 2:
        raise ConfigError("field 'n_samples': need at least 2")
    hw = cfg["half_window"]
    hw = None if hw is None else _positive(cfg, "half_window")
    header, rows = emit_figure_data("circuit", {"zone": zone, "n_samples": n, "half_window": hw})
    summary = {"zone": zone.to_dict(), "n_samples": n,
               "max_radius": max(math.hypot(r[1], r[2]) for r in rows)}
    return summary, {"circuit": (header, rows)}


def emit_figure_data(kind: str, config: dict) -> tuple[list[str], list]:
    """Plot-ready table: ``circuit`` traces ``(t, X, Y)``; ``widths`` gives the three width curves."""
    if kind == "circuit":
        zone = config["zone"]
        if isinstance(zone, dict):
            zone = parse_zone(zone)
        path = circuit_path(zone, int(config.get("n_samples", 801)), config.get("half_window"))
        return (["t [tau]", "X [hbar|Delta|]", "Y [hbar|Delta|]"],
                [list(r) for r in zip(path.t, path.X, path.Y)])
    if kind == "widths":
        c = figure_curves(float(config.get("b", 5.0)), float(config.get("t_max", 1.0)),
                          int(config.get("n_times", 101)))
        return (["t [t_s]", "ground [dx0]", "excited [dx0]", "free [dx0]"],
                [list(r) for r in zip(c["t"], c["ground"], c["excited"], c["free"])])
    raise ConfigError(f"unknown figure kind {kind!r}")


HANDLERS: dict[str, Callable[[dict], tuple[dict, Tables]]] = {
    "phases": cmd_phases,
    "dynamics": cmd_dynamics,
    "windings": cmd_windings,
    "packet": cmd_packet,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
    "circuit": cmd_circuit,
}


def run(config: dict) -> tuple[int, dict, Tables]:
    """Execute a resolved config; returns ``(exit code, record, tables)``."""
    command = config.get("command")
    if command not in HANDLERS:
        record = {"status": "config_error", "error": f"unknown command {command!r}"}
        return EXIT_CONFIG, record, {}
    record: dict[str, Any] = {
        "version": __version__,
        "config": config,
        "config_hash": config_hash(config),
    }
    try:
        summary, tables = HANDLERS[command](config)
    except (ConfigError, DomainError) as exc:
        record.update(status="config_error", error=str(exc))
        return EXIT_CONFIG, record, {}
    except (NumericalError, OverflowError) as exc:
        record.update(status="numerical_error", error=str(exc), partial=True)
        for attr in ("value", "error", "n_intervals", "diagnostics"):
            if hasattr(exc, attr):
                record.setdefault("partial_result", {})[attr] = getattr(exc, attr)
        return EXIT_NUMERICAL, record, {}
    record.update(status="ok", result=summary)
    return EXIT_OK, record, tables


# -- argument parsing -------------------------------------------------------------------------

def _add_zone_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("zone")
    g.add_argument("--delta-tau", type=float, help="detuning times tau (signed)")
    g.add_argument("--omega-alpha-tau", type=float, help="Doppler frequency times tau")
    g.add_argument("--a", type=float, help="Rabi frequency over |detuning|")
    g.add_argument("--envelope", choices=["eckart", "gaussian", "mesa"])
    g.add_argument("--half-window", type=float, help="integration half window in tau")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="berryoptics", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file (flags override its values)")
        p.add_argument("--out", help="output directory; default prints the summary to stdout")

    p = sub.add_parser("phases", help="dynamical, geometric and total phases of one zone")
    common(p)
    _add_zone_flags(p)
    p.add_argument("--methods", help="comma list of quadrature, closed_form, weak_field")
    p.add_argument("--tol", type=float)

    p = sub.add_parser("dynamics", help="integrate the two-level equations for one zone")
    common(p)
    _add_zone_flags(p)
    p.add_argument("--frame", choices=["lab", "tilde"])
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    p.add_argument("--n-samples", type=int)
    p.add_argument("--two-zone", action="store_true", default=None,
                   help="also run the blue/red pair built from this zone")
    p.add_argument("--gap", type=float, help="time between the zones, units of tau")

    p = sub.add_parser("windings", help="winding-by-winding decomposition of the geometric phase")
    common(p)
    p.add_argument("--a", type=float)
    p.add_argument("--omega-alpha-tau", type=float)
    p.add_argument("--n-windings", type=int)

    p = sub.add_parser("packet", help="focusing of a Gaussian packet by the geometric phase")
    common(p)
    p.add_argument("--b", type=float)
    p.add_argument("--profile", choices=["quadratic", "full"])
    p.add_argument("--k-dx0", type=float)
    p.add_argument("--rabi-ratio", type=float)
    p.add_argument("--n-zones", type=int, choices=[1, 2])
    p.add_argument("--t-max", type=float)
    p.add_argument("--n-times", type=int)

    p = sub.add_parser("sweep", help="phases over a grid of a, omega_alpha tau, delta tau")
    common(p)
    p.add_argument("--a", dest="axis_a", help="values 'v1,v2' or range 'start:stop:num'")
    p.add_argument("--omega-alpha-tau", dest="axis_omega_alpha_tau")
    p.add_argument("--delta-tau", dest="axis_delta_tau")
    p.add_argument("--envelope", choices=["eckart", "gaussian", "mesa"])
    p.add_argument("--methods")
    p.add_argument("--tol", type=float)

    p = sub.add_parser("validate", help="validity margins of a physical setup (default: argon)")
    common(p)
    p.add_argument("--x", type=float, help="transverse position for a phase evaluation, m")
    p.add_argument("--threshold", type=float)

    p = sub.add_parser("circuit", help="parameter-space circuit (t, X, Y)")
    common(p)
    _add_zone_flags(p)
    p.add_argument("--n-samples", type=int)
    p.add_argument("--plot-window", dest="plot_window", type=float,
                   help="half window of the plotted trace, units of tau")
    return parser


def _overrides(command: str, ns: argparse.Namespace) -> dict:
    v = {k: val for k, val in vars(ns).items()
         if val is not None and k not in ("command", "config", "out")}
    over: dict[str, Any] = {}
    zone_keys = {"delta_tau", "omega_alpha_tau", "a"}
    if command in ("phases", "dynamics", "circuit"):
        zone: dict[str, Any] = {k: v.pop(k) for k in list(v) if k in zone_keys}
        env = {}
        if "envelope" in v:
            env["kind"] = v.pop("envelope")
        if "half_window" in v:
            env["half_window"] = v.pop("half_window")
        if env:
            zone["envelope"] = env
        if zone:
            over["zone"] = zone
        if command == "circuit" and "plot_window" in v:
            over["half_window"] = v.pop("plot_window")
    elif command == "sweep":
        axes = {k[5:]: v.pop(k) for k in list(v) if k.startswith("axis_")}
        if axes:
            over["axes"] = axes
        if "envelope" in v:
            over["envelope"] = {"kind": v.pop("envelope")}
    over.update(v)
    return over


def write_outputs(command: str, record: dict, tables: Tables, out: Optional[str]) -> list[Path]:
    if out is None:
        sys.stdout.write(dump_json(record))
        return []
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    path = d / f"{command}.json"
    path.write_text(dump_json(record))
    written.append(path)
    for name, (header, rows) in sorted(tables.items()):
        path = d / f"{command}_{name}.csv"
        path.write_text(format_csv(header, rows))
        written.append(path)
    return written


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    command = ns.command
    try:
        doc = load_config_file(ns.config) if ns.config else None
        config = resolve_config(command, doc, _overrides(command, ns))
    except ConfigError as exc:
        print(f"berryoptics: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    code, record, tables = run(config)
    try:
        write_outputs(command, record, tables, ns.out)
    except OSError as exc:
        print(f"berryoptics: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if code != EXIT_OK:
        print(f"berryoptics: {record.get('status')}: {record.get('error')}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
