"""Reading and writing models, samples and result files.

Model description files are TOML::

    name = "ma1"                 # optional

    [filter]
    k_min = 0
    values = [1.0, 0.5]

    [innovations]
    kind = "centered_exponential"
    params = { rate = 1.0 }      # optional, per-kind defaults otherwise

Dotted keys (``filter.k_min = 0``) are equivalent. Numbers use a decimal
point regardless of locale. Allowed kinds and parameters are listed on
:class:`~revbispec.linmodel.InnovationSpec`.

Models can also be given inline as ``VALUES[@K_MIN][;KIND[;NAME=VALUE...]]``,
e.g. ``1,0.5@0;centered_exponential;rate=1``. The innovation kind defaults
to ``centered_exponential``.
"""

from __future__ import annotations

import math
import numbers
import os
import re
import sys
import tempfile
from pathlib import Path

import numpy as np

from .exceptions import ModelFileError
from .linmodel import FilterCoefficients, InnovationSpec, LinearModel, TimeSeriesSample

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "parse_model_text",
    "parse_inline_model",
    "load_model",
    "resolve_model",
    "model_to_toml",
    "read_sample_csv",
    "sample_to_csv",
    "write_text_atomic",
]

_TOP_KEYS = {"name", "filter", "innovations"}


def _key_line(text, key):
    # best-effort location of a dotted key for diagnostics
    leaf = key.split(".")[-1]
    pat = re.compile(rf"(^|[\s.{{,]){re.escape(leaf)}\s*=")
    section = key.split(".")[0]
    in_section = False
    fallback = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("["):
            in_section = stripped.strip("[] ").split(".")[0] == section
            if in_section and "." not in key and stripped.strip("[] ") == section:
                return lineno
            continue
        if pat.search(line):
            if in_section or stripped.startswith(f"{section}."):
                return lineno
            fallback = fallback or lineno
    return fallback


def _is_number(v):
    return isinstance(v, numbers.Real) and not isinstance(v, bool)


def parse_model_text(text):
    """Parse a TOML model description into a :class:`LinearModel`."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        msg = str(exc)
        m = re.search(r"\(at line (\d+), column (\d+)\)", msg)
        line = getattr(exc, "lineno", None) or (int(m.group(1)) if m else None)
        col = getattr(exc, "colno", None) or (int(m.group(2)) if m else None)
        base = re.sub(r"\s*\(at line \d+, column \d+\)", "", msg)
        raise ModelFileError(f"syntax error: {base}", line=line, column=col) from None

    def fail(key, message):
        raise ModelFileError(f"{key}: {message}", key=key, line=_key_line(text, key))

    for key in doc:
        if key not in _TOP_KEYS:
            fail(key, "unknown key")
    filt = doc.get("filter")
    if not isinstance(filt, dict):
        raise ModelFileError("filter: missing table", key="filter")
    for key in filt:
        if key not in ("k_min", "values"):
            fail(f"filter.{key}", "unknown key")
    if "k_min" not in filt:
        fail("filter.k_min", "missing")
    k_min = filt["k_min"]
    if not isinstance(k_min, int) or isinstance(k_min, bool):
        fail("filter.k_min", f"expected an integer, got {k_min!r}")
    values = filt.get("values")
    if values is None:
        fail("filter.values", "missing")
    if not isinstance(values, list) or not values or not all(_is_number(v) for v in values):
        fail("filter.values", "expected a non-empty array of numbers")
    if not all(math.isfinite(float(v)) for v in values):
        fail("filter.values", "values must be finite")
    try:
        filt_obj = FilterCoefficients(k_min, tuple(float(v) for v in values))
    except ValueError as exc:
        fail("filter.values", str(exc))

    innov = doc.get("innovations")
    if not isinstance(innov, dict):
        raise ModelFileError("innovations: missing table", key="innovations")
    for key in innov:
        if key not in ("kind", "params"):
            fail(f"innovations.{key}", "unknown key")
    kind = innov.get("kind")
    if not isinstance(kind, str):
        fail("innovations.kind", "missing or not a string")
    params = innov.get("params", {})
    if not isinstance(params, dict):
        fail("innovations.params", "expected a table")
    for pname, pval in params.items():
        if not _is_number(pval):
            fail(f"innovations.params.{pname}", f"expected a number, got {pval!r}")
    try:
        innov_obj = InnovationSpec(kind, {k: float(v) for k, v in params.items()})
    except ValueError as exc:
        key = "innovations.kind" if "kind" in str(exc) else "innovations.params"
        fail(key, str(exc))

    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        fail("name", "expected a string")
    return LinearModel(filt_obj, innov_obj, name)


def parse_inline_model(text):
    """Parse ``VALUES[@K_MIN][;KIND[;NAME=VALUE...]]``."""
    parts = [p.strip() for p in text.split(";")]
    head = parts[0]
    k_min = 0
    if "@" in head:
        head, _, k = head.partition("@")
        try:
            k_min = int(k)
        except ValueError:
            raise ModelFileError(f"filter.k_min: expected an integer, got {k!r}", key="filter.k_min") from None
    try:
        values = tuple(float(v) for v in head.split(",") if v.strip())
    except ValueError:
        raise ModelFileError(f"filter.values: cannot parse {head!r}", key="filter.values") from None
    kind = parts[1] if len(parts) > 1 and parts[1] else "centered_exponential"
    params = {}
    for item in parts[2:]:
        name, eq, val = item.partition("=")
        if not eq:
            raise ModelFileError(f"innovations.params: expected NAME=VALUE, got {item!r}", key="innovations.params")
        try:
            params[name.strip()] = float(val)
        except ValueError:
            raise ModelFileError(
                f"innovations.params.{name.strip()}: not a number: {val!r}", key=f"innovations.params.{name.strip()}"
            ) from None
    try:
        filt = FilterCoefficients(k_min, values)
    except ValueError as exc:
        raise ModelFileError(f"filter.values: {exc}", key="filter.values") from None
    try:
        innov = InnovationSpec(kind, params)
    except ValueError as exc:
        raise ModelFileError(f"innovations: {exc}", key="innovations") from None
    return LinearModel(filt, innov)


def load_model(path):
    return parse_model_text(Path(path).read_text(encoding="utf-8"))


def resolve_model(arg):
    """A model from a file path, or from the inline grammar when no such file exists."""
    path = Path(arg)
    if path.is_file():
        return load_model(path)
    if re.match(r"^\s*[-+]?[\d.]", arg):
        return parse_inline_model(arg)
    raise ModelFileError(f"model file not found: {arg}")


def model_to_toml(model):
    lines = []
    if model.name:
        lines.append(f'name = "{model.name}"')
        lines.append("")
    vals = ", ".join(repr(v) for v in model.filter.values)
    lines += ["[filter]", f"k_min = {model.filter.k_min}", f"values = [{vals}]", ""]
    params = ", ".join(f"{k} = {v!r}" for k, v in model.innovations.params.items())
    lines += ["[innovations]", f'kind = "{model.innovations.kind}"', f"params = {{ {params} }}", ""]
    return "\n".join(lines)


def sample_to_csv(sample):
    vals = getattr(sample, "values", sample)
    return "x\n" + "".join(f"{float(v)!r}\n" for v in vals)


def read_sample_csv(path):
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or lines[0].strip() != "x":
        raise ModelFileError("sample file must start with header 'x'", line=1, column=1)
    vals = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            vals.append(float(line))
        except ValueError:
            raise ModelFileError(f"not a number: {line.strip()!r}", line=lineno, column=1) from None
    if not vals:
        raise ModelFileError("sample file has no values")
    return TimeSeriesSample(np.array(vals), seed=None, provenance=f"file:{Path(path).name}")


def write_text_atomic(path, text):
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
