"""Scenario configuration: strict JSON parsing with exhaustive diagnostics."""

from __future__ import annotations

import hashlib
import json
import math
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .disorder import DISTRIBUTIONS, OBSERVABLES, DisorderModel
from .dynamics import CONVENTIONS, DEFAULT_DT_US, DEFAULT_INITIAL_SITE, DEFAULT_T_AVG_US
from .lattice import JSON_KEYS, ChainSpec

KINDS = ("spectrum", "eigensweep", "quench", "chiral", "bands", "fit-roundtrip", "disorder")
COMMON_KEYS = {"kind", "description", "output_prefix", "output_dir"}
KIND_KEYS = {
    "spectrum": {"spec", "probe_site", "fwhm_khz", "grid_step_khz"},
    "eigensweep": {"n_cells", "j1_khz", "ratio_grid"},
    "quench": {"spec", "initial_site", "t_max_us", "dt_us"},
    "chiral": {"spec", "sweep", "initial_site", "t_max_us", "dt_us", "convention"},
    "bands": {"j1_khz", "j2_khz", "n_k"},
    "fit-roundtrip": {
        "spec", "probe_site", "fwhm_khz", "grid_step_khz", "n_peaks",
        "noise_fraction", "noise_seed", "max_iter", "tol",
    },
    "disorder": {
        "spec", "disorder", "n_samples", "observable", "initial_site", "t_max_us",
        "dt_us", "probe_site", "fwhm_khz",
    },
}
SWEEP_KEYS = {"n_cells", "parameter_sets", "theory_j1_khz", "ratio_grid"}
DISORDER_KEYS = {"sigma_j_khz", "sigma_u_khz", "distribution", "seed"}
RATIO_GRID_KEYS = {"start", "stop", "num", "spacing"}

_MISSING = object()


class ConfigError(ValueError):
    """Invalid scenario configuration; ``problems`` lists every violation."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


class _Checker:
    def __init__(self) -> None:
        self.problems: list[str] = []

    def fail(self, field: str, message: str) -> None:
        self.problems.append(f"{field}: {message}")

    def unknown(self, data: dict, allowed: set[str], prefix: str = "") -> None:
        for key in sorted(set(data) - allowed):
            self.fail(prefix + key, "unknown key")

    def number(self, data: dict, key: str, prefix: str = "", default: Any = _MISSING, *,
               integer: bool = False, minimum: float | None = None, positive: bool = False) -> Any:
        name = prefix + key
        if key not in data:
            if default is _MISSING:
                self.fail(name, "required")
                return None
            return default
        value = data[key]
        if not _is_number(value) or (integer and int(value) != value):
            self.fail(name, "expected a finite integer" if integer else "expected a finite number")
            return None
        if positive and not value > 0:
            self.fail(name, f"must be > 0, got {value}")
            return None
        if minimum is not None and value < minimum:
            self.fail(name, f"must be >= {minimum}, got {value}")
            return None
        return int(value) if integer else float(value)

    def choice(self, data: dict, key: str, options, prefix: str = "", default: Any = _MISSING) -> Any:
        if key not in data:
            if default is _MISSING:
                self.fail(prefix + key, "required")
            return None if default is _MISSING else default
        if data[key] not in options:
            self.fail(prefix + key, f"expected one of {', '.join(options)}, got {data[key]!r}")
            return None
        return data[key]

    def obj(self, data: dict, key: str, prefix: str = "") -> dict | None:
        if key not in data:
            self.fail(prefix + key, "required")
            return None
        if not isinstance(data[key], dict):
            self.fail(prefix + key, "expected an object")
            return None
        return data[key]

    def number_list(self, data: dict, key: str, length: int | None, prefix: str = "") -> list[float] | None:
        value = data.get(key)
        if value is None:
            return None
        name = prefix + key
        if not isinstance(value, list) or not all(_is_number(v) for v in value):
            self.fail(name, "expected a list of finite numbers")
            return None
        if length is not None and len(value) != length:
            self.fail(name, f"expected {length} entries, got {len(value)}")
            return None
        return [float(v) for v in value]

    def chain_spec(self, data: dict, key: str = "spec") -> ChainSpec | None:
        raw = self.obj(data, key)
        if raw is None:
            return None
        before = len(self.problems)
        p = key + "."
        self.unknown(raw, set(JSON_KEYS), p)
        n = self.number(raw, "n_cells", p, integer=True, minimum=1)
        j1 = self.number(raw, "j_intra_khz", p, minimum=0)
        j2 = self.number(raw, "j_inter_khz", p, minimum=0)
        sites = 2 * n if n is not None else None
        overrides = self.number_list(raw, "bond_overrides_khz", sites - 1 if sites else None, p)
        onsite = self.number_list(raw, "onsite_khz", sites, p)
        if None in (n, j1, j2) or len(self.problems) > before:
            return None
        return ChainSpec(n, j1, j2, tuple(overrides) if overrides is not None else None, tuple(onsite or ()))

    def site(self, data: dict, key: str, n_sites: int | None, default: Any = _MISSING) -> int | None:
        value = self.number(data, key, default=default, integer=True, minimum=1)
        if value is not None and n_sites is not None and value > n_sites:
            self.fail(key, f"must lie in 1..{n_sites}, got {value}")
            return None
        return value

    def ratio_grid(self, data: dict, key: str, prefix: str = "") -> list[float] | None:
        name = prefix + key
        if key not in data:
            self.fail(name, "required")
            return None
        value = data[key]
        if isinstance(value, list):
            if not value or not all(_is_number(v) and v > 0 for v in value):
                self.fail(name, "ratios must be a non-empty list of numbers > 0")
                return None
            return [float(v) for v in value]
        if not isinstance(value, dict):
            self.fail(name, "expected a list of ratios or an object {start, stop, num, spacing}")
            return None
        p = name + "."
        self.unknown(value, RATIO_GRID_KEYS, p)
        start = self.number(value, "start", p, positive=True)
        stop = self.number(value, "stop", p, positive=True)
        num = self.number(value, "num", p, integer=True, minimum=2)
        spacing = self.choice(value, "spacing", ("log", "linear"), p, default="log")
        if None in (start, stop, num, spacing):
            return None
        if not stop > start:
            self.fail(name, "stop must exceed start")
            return None
        if spacing == "log":
            grid = np.geomspace(start, stop, num)
        else:
            grid = np.linspace(start, stop, num)
        return grid.tolist()


def _times(chk: _Checker, data: dict) -> tuple[float | None, float | None]:
    t_max = chk.number(data, "t_max_us", default=DEFAULT_T_AVG_US, positive=True)
    dt = chk.number(data, "dt_us", default=DEFAULT_DT_US, positive=True)
    if t_max is not None and dt is not None and dt > t_max:
        chk.fail("dt_us", f"must not exceed t_max_us ({t_max})")
    return t_max, dt


def parse_config(data: Any) -> dict:
    """Validate a decoded config and return it normalized.

    Raises :class:`ConfigError` listing every problem found.
    """
    chk = _Checker()
    if not isinstance(data, dict):
        raise ConfigError(["<root>: expected a JSON object"])
    kind = chk.choice(data, "kind", KINDS)
    if kind is None:
        raise ConfigError(chk.problems)
    chk.unknown(data, COMMON_KEYS | KIND_KEYS[kind])
    cfg: dict[str, Any] = {"kind": kind}
    prefix = data.get("output_prefix", kind.replace("-", "_"))
    if not isinstance(prefix, str) or not prefix or "/" in prefix or "\\" in prefix:
        chk.fail("output_prefix", "expected a non-empty file-name stem")
    cfg["output_prefix"] = prefix
    out_dir = data.get("output_dir", "out")
    if not isinstance(out_dir, str) or not out_dir:
        chk.fail("output_dir", "expected a non-empty path string")
    cfg["output_dir"] = out_dir
    if "description" in data and not isinstance(data["description"], str):
        chk.fail("description", "expected a string")

    if kind in ("spectrum", "fit-roundtrip"):
        spec = cfg["spec"] = chk.chain_spec(data)
        cfg["probe_site"] = chk.site(data, "probe_site", spec.n_sites if spec else None)
        cfg["fwhm_khz"] = chk.number(data, "fwhm_khz", positive=True)
        cfg["grid_step_khz"] = chk.number(data, "grid_step_khz", default=1.0, positive=True)
        if kind == "fit-roundtrip":
            cfg["n_peaks"] = chk.number(data, "n_peaks", default=spec.n_sites if spec else 6, integer=True, minimum=1)
            cfg["noise_fraction"] = chk.number(data, "noise_fraction", default=0.0, minimum=0)
            cfg["noise_seed"] = chk.number(data, "noise_seed", default=0, integer=True, minimum=0)
            cfg["max_iter"] = chk.number(data, "max_iter", default=200, integer=True, minimum=1)
            cfg["tol"] = chk.number(data, "tol", default=1e-10, positive=True)
    elif kind == "eigensweep":
        cfg["n_cells"] = chk.number(data, "n_cells", default=3, integer=True, minimum=1)
        cfg["j1_khz"] = chk.number(data, "j1_khz", default=400.0, positive=True)
        cfg["ratio_grid"] = chk.ratio_grid(data, "ratio_grid")
    elif kind == "quench":
        spec = cfg["spec"] = chk.chain_spec(data)
        cfg["initial_site"] = chk.site(data, "initial_site", spec.n_sites if spec else None, DEFAULT_INITIAL_SITE)
        cfg["t_max_us"], cfg["dt_us"] = _times(chk, data)
    elif kind == "chiral":
        cfg["convention"] = chk.choice(data, "convention", CONVENTIONS, default="relative")
        cfg["t_max_us"], cfg["dt_us"] = _times(chk, data)
        if ("spec" in data) == ("sweep" in data):
            chk.fail("spec", "exactly one of spec or sweep is required")
        elif "spec" in data:
            spec = cfg["spec"] = chk.chain_spec(data)
            cfg["initial_site"] = chk.site(data, "initial_site", spec.n_sites if spec else None, DEFAULT_INITIAL_SITE)
        else:
            sweep = chk.obj(data, "sweep")
            if sweep is not None:
                p = "sweep."
                chk.unknown(sweep, SWEEP_KEYS, p)
                n_cells = chk.number(sweep, "n_cells", p, default=3, integer=True, minimum=1)
                cfg["initial_site"] = chk.site(
                    data, "initial_site", 2 * n_cells if n_cells else None, DEFAULT_INITIAL_SITE
                )
                sets = sweep.get("parameter_sets", [])
                if not isinstance(sets, list) or not all(
                    isinstance(s, list) and len(s) == 2 and all(_is_number(v) and v >= 0 for v in s) and any(s)
                    for s in sets
                ):
                    chk.fail(p + "parameter_sets", "expected a list of [j1_khz, j2_khz] pairs, not both zero")
                    sets = []
                theory = chk.number_list(sweep, "theory_j1_khz", None, p) or []
                if any(not j > 0 for j in theory):
                    chk.fail(p + "theory_j1_khz", "rates must be > 0")
                grid = chk.ratio_grid(sweep, "ratio_grid", p) if theory else []
                if not sets and not theory:
                    chk.fail(p + "parameter_sets", "sweep needs parameter_sets or theory_j1_khz")
                cfg["sweep"] = {
                    "n_cells": n_cells,
                    "parameter_sets": [[float(a), float(b)] for a, b in sets],
                    "theory_j1_khz": theory,
                    "ratio_grid": grid,
                }
    elif kind == "bands":
        cfg["j1_khz"] = chk.number(data, "j1_khz", minimum=0)
        cfg["j2_khz"] = chk.number(data, "j2_khz", minimum=0)
        cfg["n_k"] = chk.number(data, "n_k", default=201, integer=True, minimum=2)
    elif kind == "disorder":
        spec = cfg["spec"] = chk.chain_spec(data)
        raw = chk.obj(data, "disorder")
        if raw is not None:
            p = "disorder."
            chk.unknown(raw, DISORDER_KEYS, p)
            sj = chk.number(raw, "sigma_j_khz", p, default=0.0, minimum=0)
            su = chk.number(raw, "sigma_u_khz", p, default=0.0, minimum=0)
            dist = chk.choice(raw, "distribution", DISTRIBUTIONS, p, default="uniform-bounded")
            seed = chk.number(raw, "seed", p, default=0, integer=True, minimum=0)
            if seed is not None and seed >= 2**64:
                chk.fail(p + "seed", "must be < 2**64")
            elif None not in (sj, su, dist, seed):
                cfg["disorder"] = DisorderModel(sj, su, dist, seed)
        cfg["n_samples"] = chk.number(data, "n_samples", integer=True, minimum=2)
        cfg["observable"] = chk.choice(data, "observable", OBSERVABLES, default="eigenvalues")
        n_sites = spec.n_sites if spec else None
        cfg["initial_site"] = chk.site(data, "initial_site", n_sites, DEFAULT_INITIAL_SITE)
        cfg["probe_site"] = chk.site(data, "probe_site", n_sites, 2)
        cfg["fwhm_khz"] = chk.number(data, "fwhm_khz", default=65.0, positive=True)
        cfg["t_max_us"], cfg["dt_us"] = _times(chk, data)

    if chk.problems:
        raise ConfigError(chk.problems)
    return cfg


def config_hash(data: Any) -> str:
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def read_config(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"<file>: cannot read {path}: {exc.strerror or exc}"]) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"<file>: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"]) from exc


def validate_config(path: str | Path) -> list[str]:
    """Every problem found in the config at ``path``; empty when valid."""
    try:
        parse_config(read_config(path))
    except ConfigError as exc:
        return exc.problems
    return []


def preset_names() -> list[str]:
    root = resources.files("sshladder") / "presets"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def preset_text(name: str) -> str:
    if not name.endswith(".json"):
        name += ".json"
    if name not in preset_names():
        raise KeyError(name)
    return (resources.files("sshladder") / "presets" / name).read_text(encoding="utf-8")
