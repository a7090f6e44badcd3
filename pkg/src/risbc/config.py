"""Config parsing, run manifests, figure presets, and CSV emission.

Run inputs are flat INI-style files with three sections:

    [scenario]   every ScenarioConfig field (n_bs, n_ris, ptx_dbm, ...)
    [sweep]      variable, values, reps, methods
    [strategy]   max_sweeps, rel_tolerance, grid_points (optimizer tuning)

All keys are optional; an empty file yields the default downlink scenario
and the default transmit-power sweep.  Unknown sections or keys are
rejected with the offending name and line number.  `serialize_config`
writes the fully resolved canonical text back out; its SHA-256 is the run
identity, embedded in every output filename so CSVs can always be traced
to the exact configuration (plus seed) that produced them.

Sweep results go to a long-format CSV (one row per sweep point and method)
and bound checks to a smaller report CSV whose `satisfied` column drives
the CLI exit status.
"""

import hashlib
import json
import re
from dataclasses import asdict, dataclass

import numpy as np

from .bounds import (
    BoundReport,
    aligned_phase_closed_forms,
    random_phase_closed_forms,
)
from .channel import (
    ScenarioConfig,
    draw_user_positions,
    nominal_pathlosses,
    position_rng,
)
from .phases import StrategySpec
from .sweep import MethodSpec, SweepPlan, SweepResult

SWEEP_CSV_HEADER = (
    "sweep_var,value,precoder,strategy,mode,"
    "se_mean,se_std,se_d_mean,se_r_mean,reps,flagged"
)
BOUND_CSV_HEADER = "bound_name,x_or_setting,lhs,rhs,slack,satisfied"

DEFAULT_METHOD_LABELS = (
    "ZF:align_weak:exact",
    "ZF:align_weak:asymptotic",
    "DPC:align_weak:exact",
    "DPC:align_weak:asymptotic",
)
DEFAULT_SWEEP_VALUES = tuple(float(v) for v in range(0, 41, 5))

_BOOLS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _to_bool(raw):
    try:
        return _BOOLS[raw.strip().lower()]
    except KeyError:
        raise ValueError(f"not a boolean: {raw!r}")


def _to_floats(raw):
    return tuple(float(tok) for tok in raw.replace(",", " ").split())


def _to_point(raw):
    vals = _to_floats(raw)
    if len(vals) != 3:
        raise ValueError(f"expected 3 coordinates, got {len(vals)}")
    return vals


def _to_pair(raw):
    vals = _to_floats(raw)
    if len(vals) != 2:
        raise ValueError(f"expected 2 pathloss coefficients, got {len(vals)}")
    return vals


# key -> parser, in ScenarioConfig declaration order (reused for serialization)
_SCENARIO_KEYS = {
    "n_bs": int,
    "n_ris": int,
    "n_strong": int,
    "bs_pos": _to_point,
    "ris_pos": _to_point,
    "user_circle_center": _to_point,
    "user_circle_radius": float,
    "ptx_dbm": float,
    "noise_dbm": float,
    "weak_extra_loss_db": float,
    "direct_extra_loss_db": float,
    "pl_direct": _to_pair,
    "pl_ris_user": _to_pair,
    "pl_los": _to_pair,
    "aoa": float,
    "aod": float,
    "power_divisor": str.strip,
    "freeze_positions": _to_bool,
    "seed": int,
}
_SWEEP_KEYS = ("variable", "values", "reps", "methods")
_STRATEGY_KEYS = {"max_sweeps": int, "rel_tolerance": float, "grid_points": int}
_SECTIONS = ("scenario", "sweep", "strategy")

_KEY_RE = re.compile(r"^\s*([A-Za-z_][\w.-]*)\s*[=:]")
_SECTION_RE = re.compile(r"^\s*\[([^\]]*)\]")


def _find_line(text, section, key=None):
    """Line number of a key inside a section (or of the section header)."""
    current = None
    for number, line in enumerate(text.splitlines(), 1):
        m = _SECTION_RE.match(line)
        if m:
            current = m.group(1).strip().lower()
            if key is None and current == section:
                return number
            continue
        if key is None:
            continue
        m = _KEY_RE.match(line)
        if m and current == section and m.group(1).lower() == key:
            return number
    return None


def _at_line(text, section, key):
    line = _find_line(text, section, key)
    return f" (line {line})" if line is not None else ""


def _section_items(text):
    import configparser

    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ValueError(f"config parse error: {exc}") from None
    for name in cp.sections():
        if name.lower() not in _SECTIONS:
            line = _find_line(text, name.lower())
            at = f" (line {line})" if line is not None else ""
            raise ValueError(f"unknown section [{name}]{at}")
    return {name.lower(): dict(cp[name]) for name in cp.sections()}


def _parse_section(text, items, section, parsers):
    out = {}
    for key, raw in items.get(section, {}).items():
        if key not in parsers:
            raise ValueError(
                f"unknown key {key!r} in [{section}]{_at_line(text, section, key)}"
            )
        try:
            out[key] = parsers[key](raw)
        except ValueError as exc:
            raise ValueError(
                f"bad value for {key!r} in [{section}]"
                f"{_at_line(text, section, key)}: {exc}"
            ) from None
    return out


def _parse_methods(labels, tuning):
    methods = []
    for label in labels:
        parts = [p.strip() for p in label.split(":")]
        if len(parts) != 3:
            raise ValueError(
                f"bad method spec {label!r} (want PRECODER:strategy:mode)"
            )
        precoder, kind, mode = parts
        methods.append(
            MethodSpec(
                precoder=precoder,
                strategy=StrategySpec(kind=kind, **tuning),
                mode=mode,
            )
        )
    return tuple(methods)


def parse_config(text: str):
    """Parse config text into (ScenarioConfig, SweepPlan).

    Omitted keys fall back to the default downlink scenario and the default
    transmit-power sweep; the empty string is a valid config.
    """
    items = _section_items(text)

    scenario_kwargs = _parse_section(text, items, "scenario", _SCENARIO_KEYS)
    try:
        cfg = ScenarioConfig(**scenario_kwargs)
    except ValueError as exc:
        raise ValueError(f"{exc}{_at_line(text, 'scenario', 'n_bs')}") from None

    tuning = _parse_section(text, items, "strategy", _STRATEGY_KEYS)

    sweep_raw = items.get("sweep", {})
    for key in sweep_raw:
        if key not in _SWEEP_KEYS:
            raise ValueError(
                f"unknown key {key!r} in [sweep]{_at_line(text, 'sweep', key)}"
            )
    variable = sweep_raw.get("variable", "ptx_dbm").strip()
    values = (
        _to_floats(sweep_raw["values"])
        if "values" in sweep_raw
        else DEFAULT_SWEEP_VALUES
    )
    reps = int(sweep_raw.get("reps", 200))
    labels = (
        tuple(s.strip() for s in sweep_raw["methods"].split(","))
        if "methods" in sweep_raw
        else DEFAULT_METHOD_LABELS
    )
    try:
        methods = _parse_methods(labels, tuning)
        plan = SweepPlan(cfg, variable, values, methods, reps)
    except ValueError as exc:
        raise ValueError(f"[sweep]: {exc}") from None
    return cfg, plan


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def serialize_config(cfg: ScenarioConfig, plan: SweepPlan) -> str:
    """Canonical, fully resolved config text (the hashed run identity)."""
    lines = ["[scenario]"]
    lines += [f"{key} = {_fmt(getattr(cfg, key))}" for key in _SCENARIO_KEYS]
    lines += [
        "",
        "[sweep]",
        f"variable = {plan.variable}",
        "values = " + ", ".join(repr(v) for v in plan.values),
        f"reps = {plan.reps}",
        "methods = " + ", ".join(m.label for m in plan.methods),
    ]
    tuning = plan.methods[0].strategy
    lines += [
        "",
        "[strategy]",
        f"max_sweeps = {tuning.max_sweeps}",
        f"rel_tolerance = {repr(tuning.rel_tolerance)}",
        f"grid_points = {tuning.grid_points}",
        "",
    ]
    return "\n".join(lines)


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class RunManifest:
    """Sidecar metadata tying every output file to its exact configuration."""

    config_path: str  # source file, or "<defaults>" / "<preset:...>"
    output_dir: str
    sweep_name: str
    config_sha256: str  # hash of the canonical config text (timestamp-free)
    timestamp: str
    seed: int
    outputs: list

    @property
    def hash8(self) -> str:
        return self.config_sha256[:8]

    def to_json(self) -> str:
        record = asdict(self)
        record["hash8"] = self.hash8
        return json.dumps(record, indent=2) + "\n"


def write_manifest(manifest: RunManifest, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(manifest.to_json())


# =========================================================================
# CSV emission
# =========================================================================


def _g9(value) -> str:
    return format(float(value), ".9g")


def emit_csv(result: SweepResult, path) -> None:
    """Long-format sweep CSV: one row per (sweep value, method)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SWEEP_CSV_HEADER + "\n")
        for r in result.rows:
            fh.write(
                ",".join(
                    [
                        r.sweep_var,
                        _g9(r.value),
                        r.precoder,
                        r.strategy,
                        r.mode,
                        _g9(r.se_mean),
                        _g9(r.se_std),
                        _g9(r.se_d_mean),
                        _g9(r.se_r_mean),
                        str(r.reps),
                        str(r.flagged),
                    ]
                )
                + "\n"
            )


def emit_bound_report(reports, path) -> None:
    """Bound-check CSV; any satisfied=false row must fail the CLI run."""
    if not reports:
        raise ValueError("empty bound report")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(BOUND_CSV_HEADER + "\n")
        for r in reports:
            fh.write(
                ",".join(
                    [
                        r.name,
                        _g9(r.setting),
                        _g9(r.lhs),
                        _g9(r.rhs),
                        _g9(r.slack),
                        "true" if r.satisfied else "false",
                    ]
                )
                + "\n"
            )


# =========================================================================
# figure presets
# =========================================================================


def figure_preset(number: int, seed: int = 0, reps: int = 200):
    """Preset (config, plan) pairs for the four standard figures.

    2: sum SE vs transmit power, exact and high-SNR curves.
    3: direct/reflected SE split vs the BS-RIS orthogonality parameter xi
       on a log grid (small array, N_B = 4).
    4: sum SE vs number of BS antennas at 40 dBm.
    5: reflected SE vs number of RIS elements with attenuated direct links
       and frozen positions -- the ZF saturation / DPC scaling setup; pairs
       with the ergodic closed-form report of `figure5_bound_reports`.
    """
    base = ScenarioConfig(seed=seed)
    if number == 2:
        cfg = base
        plan = SweepPlan(
            cfg, "ptx_dbm", DEFAULT_SWEEP_VALUES,
            _parse_methods(DEFAULT_METHOD_LABELS, {}), reps,
        )
    elif number == 3:
        cfg = base.with_updates(n_bs=4, ptx_dbm=40.0)
        plan = SweepPlan(
            cfg, "xi", tuple(float(x) for x in np.logspace(-2.0, 3.0, 11)),
            _parse_methods(DEFAULT_METHOD_LABELS, {}), reps,
        )
    elif number == 4:
        cfg = base.with_updates(ptx_dbm=40.0)
        plan = SweepPlan(
            cfg, "n_bs", (4.0, 6.0, 8.0, 10.0, 12.0),
            _parse_methods(DEFAULT_METHOD_LABELS, {}), reps,
        )
    elif number == 5:
        cfg = base.with_updates(
            ptx_dbm=40.0, direct_extra_loss_db=20.0, freeze_positions=True
        )
        labels = (
            "ZF:random:asymptotic",
            "ZF:align_weak:asymptotic",
            "DPC:random:asymptotic",
            "DPC:align_weak:asymptotic",
        )
        plan = SweepPlan(
            cfg, "n_ris", (16.0, 32.0, 64.0, 128.0, 256.0),
            _parse_methods(labels, {}), reps,
        )
    else:
        raise ValueError("figure must be 2, 3, 4, or 5")
    return cfg, plan


def figure5_bound_reports(result: SweepResult) -> list:
    """Ergodic closed-form checks against the element-count sweep's means.

    Upper/lower bounds are compared directly; the random-phase DPC value is
    an ergodic equality, so it is accepted within a Monte Carlo tolerance of
    6/sqrt(reps) (about three standard errors of the per-draw log spread).
    """
    cfg = result.plan.config
    if not cfg.freeze_positions:
        raise ValueError("closed-form comparison needs frozen user positions")
    pl = nominal_pathlosses(cfg, draw_user_positions(cfg, position_rng(cfg.seed)))
    p_bar = cfg.p_bar()
    reports = []
    for row in result.rows:
        if row.mode != "asymptotic":
            continue
        cfg_v = cfg.with_updates(n_ris=int(row.value))
        mc = row.se_r_mean
        if row.strategy in ("random", "statistical"):
            lin_upper, dpc_value = random_phase_closed_forms(cfg_v, pl, p_bar)
            if row.precoder == "ZF":
                reports.append(BoundReport(
                    "weak_zf_random_upper", row.value, mc, lin_upper,
                    mc <= lin_upper, mc - lin_upper,
                ))
            else:
                slack = mc - dpc_value
                reports.append(BoundReport(
                    "weak_dpc_random_value", row.value, mc, dpc_value,
                    abs(slack) <= 6.0 / np.sqrt(row.reps), slack,
                ))
        elif row.strategy == "align_weak":
            lin_upper, dpc_lower = aligned_phase_closed_forms(cfg_v, pl, p_bar)
            if row.precoder == "ZF":
                reports.append(BoundReport(
                    "weak_zf_aligned_upper", row.value, mc, lin_upper,
                    mc <= lin_upper, mc - lin_upper,
                ))
            else:
                reports.append(BoundReport(
                    "weak_dpc_aligned_lower", row.value, mc, dpc_lower,
                    mc >= dpc_lower, mc - dpc_lower,
                ))
    return reports
