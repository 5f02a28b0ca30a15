"""Scenario config files, CSV time series and plot-data exports.

Scenario files are flat ``key = value`` lines with dotted keys mirroring the
nested :class:`~heliasdo.scenario.Scenario` fields (``elev.asdo.k1 = 2.0``).
Blank lines and ``#`` comments are ignored, unknown keys are errors and any
key left out keeps its default.  Special value syntaxes:

* exponents: ``elev.ctrl.r = 3/5`` (odd numerator and denominator)
* tables: ``d1.table = 0:0, 10:0.5, 100:0.5`` (``time:value`` pairs)
"""

from __future__ import annotations

import dataclasses
from collections.abc import Mapping, Sequence
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .numerics import OddRatioExponent
from .scenario import COLUMNS, Scenario, TimeSeries


def _children(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, OddRatioExponent):
        return [(f.name, getattr(obj, f.name)) for f in dataclasses.fields(obj)]
    if isinstance(obj, tuple) and hasattr(obj, "_fields"):
        return list(zip(obj._fields, obj))
    return None


def _format_value(v) -> str:
    if isinstance(v, OddRatioExponent):
        return str(v)
    if isinstance(v, bool):
        raise TypeError("boolean config values are not supported")
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(f"{t!r}:{x!r}" for t, x in v)
    return str(v)


def _parse_like(template, text: str, key: str):
    text = text.strip()
    try:
        if isinstance(template, OddRatioExponent):
            num, _, den = text.partition("/")
            return OddRatioExponent(int(num), int(den)) if den else OddRatioExponent.from_float(float(num))
        if isinstance(template, bool):
            raise TypeError
        if isinstance(template, int):
            return int(text)
        if isinstance(template, float):
            return float(text)
        if isinstance(template, tuple):
            if not text:
                return ()
            pairs = []
            for item in text.split(","):
                t, _, v = item.partition(":")
                pairs.append((float(t), float(v)))
            return tuple(pairs)
        return text
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {text!r} ({exc})") from None


def flatten(obj, prefix: str = "") -> dict[str, str]:
    """Dotted-key view of a scenario (or any nested config value)."""
    out = {}
    for name, value in _children(obj):
        key = f"{prefix}{name}"
        if _children(value) is not None:
            out.update(flatten(value, key + "."))
        else:
            out[key] = _format_value(value)
    return out


def apply_overrides(obj, overrides: Mapping[str, str], _prefix: str = ""):
    """Return a copy of ``obj`` with dotted-key string overrides applied."""
    grouped: dict[str, dict[str, str]] = {}
    leaves: dict[str, str] = {}
    for key, text in overrides.items():
        head, dot, rest = key.partition(".")
        if dot:
            grouped.setdefault(head, {})[rest] = text
        else:
            leaves[head] = text
    fields = dict(_children(obj))
    changes = {}
    for name, text in leaves.items():
        if name not in fields or _children(fields[name]) is not None:
            raise ConfigError(f"unknown config key {_prefix + name!r}")
        changes[name] = _parse_like(fields[name], text, _prefix + name)
    for name, sub in grouped.items():
        if name not in fields or _children(fields[name]) is None:
            raise ConfigError(f"unknown config section {_prefix + name!r}")
        changes[name] = apply_overrides(fields[name], sub, f"{_prefix}{name}.")
    if not changes:
        return obj
    if isinstance(obj, tuple):
        return obj._replace(**changes)
    try:
        return dataclasses.replace(obj, **changes)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def dumps_scenario(sc: Scenario) -> str:
    lines = ["# heliasdo scenario"]
    lines += [f"{k} = {v}" for k, v in flatten(sc).items()]
    return "\n".join(lines) + "\n"


def parse_kv_lines(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq or not key.strip():
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key = key.strip()
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def loads_scenario(text: str, base: Scenario | None = None) -> Scenario:
    return apply_overrides(base if base is not None else Scenario(), parse_kv_lines(text))


def write_scenario(sc: Scenario, path) -> None:
    Path(path).write_text(dumps_scenario(sc), encoding="utf-8")


def read_scenario(path, base: Scenario | None = None) -> Scenario:
    return loads_scenario(Path(path).read_text(encoding="utf-8"), base)


# ----------------------------------------------------------------------------
# series

def write_csv(series: TimeSeries, path) -> None:
    """One header row plus one row per step, floats at 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(COLUMNS) + "\n")
        for row in series.as_matrix():
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def read_csv(path) -> TimeSeries:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != COLUMNS:
            raise ConfigError(f"{path}: unexpected CSV header")
        arr = _load_rows(fh.read(), ",", len(COLUMNS))
    data = {c: arr[:, i] for i, c in enumerate(COLUMNS)}
    step = float(arr[1, 0] - arr[0, 0]) if len(arr) > 1 else float("nan")
    return TimeSeries(data, step)


def emit_plot_data(series, columns: Sequence[str], path) -> None:
    """Whitespace-separated plot file, time first, ``#`` header naming columns.

    ``series`` is a :class:`TimeSeries` or a mapping ``label -> TimeSeries``;
    with a mapping, columns are written ``label.column`` so runs can be laid
    side by side (all runs must share the time grid).
    """
    if not columns:
        raise ValueError("no columns requested")
    if isinstance(series, Mapping):
        runs = dict(series)
        first = next(iter(runs.values()))
        for label, ts in runs.items():
            if len(ts) != len(first) or not np.array_equal(ts.t, first.t):
                raise ValueError(f"run {label!r} is on a different time grid")
    else:
        runs = None
        first = series
    cols = [first.t]
    for name in columns:
        if runs is not None:
            label, dot, col = name.partition(".")
            if not dot or label not in runs:
                raise KeyError(f"unknown column {name!r}")
            cols.append(runs[label][col])
        else:
            cols.append(first[name])
    arr = np.column_stack(cols) if len(first) else np.empty((0, len(cols)))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# t " + " ".join(columns) + "\n")
        for row in arr:
            fh.write(" ".join("%.17g" % v for v in row) + "\n")


def read_plot_data(path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        names = fh.readline().lstrip("#").split()
        arr = _load_rows(fh.read(), None, len(names))
    return names, arr


def _load_rows(text: str, delimiter, ncols: int) -> np.ndarray:
    if not text.strip():
        return np.empty((0, ncols))
    return np.loadtxt(text.splitlines(), delimiter=delimiter, ndmin=2).reshape(-1, ncols)
