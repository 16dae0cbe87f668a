"""File formats read and written by the command-line tool.

Covariance spec (JSON)::

    {"n": 1, "hbar_ref": 1.0, "mean": [0, 0], "sigma": [[0.5, 0], [0, 0.5]]}

``sigma`` may be nested rows or a flat row-major list of ``4 n^2`` numbers.

Wavefunction and Wigner grids are CSV files with one metadata line
``# hbar=<float> L=<float> N=<int>`` followed by a column header
(``x,re,im`` or ``x,p,w``) and rows written with 17 significant digits.
Wigner rows run over ``p`` fastest.
"""

import hashlib
import json
import re

import numpy as np

from .errors import ParseError
from .wignergrid import GridWavefunction, PositionGrid, WignerGrid, momentum_lattice

SYMMETRY_RTOL = 1e-12
_META = re.compile(r"^#\s*(.*)$")


def fmt(v):
    return format(float(v), ".17g")


def file_digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _number(value, field):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"field '{field}' must be a number, got {value!r}", field)
    if not np.isfinite(value):
        raise ParseError(f"field '{field}' must be finite", field)
    return float(value)


def parse_covariance_spec(text):
    """Parse a covariance spec document.

    Returns
    -------
    dict
        ``n``, ``hbar_ref``, ``mean`` (ndarray) and ``sigma`` (ndarray).
        Positive definiteness is *not* checked here.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    for key in ("n", "hbar_ref", "sigma"):
        if key not in doc:
            raise ParseError(f"missing field '{key}'", key)
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParseError(f"field 'n' must be a positive integer, got {n!r}", "n")
    hbar_ref = _number(doc["hbar_ref"], "hbar_ref")
    if hbar_ref <= 0:
        raise ParseError("field 'hbar_ref' must be positive", "hbar_ref")
    dim = 2 * n

    raw = doc["sigma"]
    if not isinstance(raw, list):
        raise ParseError("field 'sigma' must be a list", "sigma")
    flat = []
    for row in raw:
        flat.extend(row if isinstance(row, list) else [row])
    if len(flat) != dim * dim:
        raise ParseError(f"field 'sigma' must hold {dim * dim} numbers, got {len(flat)}", "sigma")
    sigma = np.array([_number(v, "sigma") for v in flat]).reshape(dim, dim)
    scale = max(np.abs(sigma).max(), np.finfo(float).tiny)
    if np.abs(sigma - sigma.T).max() > SYMMETRY_RTOL * scale:
        raise ParseError("field 'sigma' is not symmetric", "sigma")

    mean_raw = doc.get("mean", [0.0] * dim)
    if not isinstance(mean_raw, list) or len(mean_raw) != dim:
        raise ParseError(f"field 'mean' must be a list of {dim} numbers", "mean")
    mean = np.array([_number(v, "mean") for v in mean_raw])
    return {"n": n, "hbar_ref": hbar_ref, "mean": mean, "sigma": sigma}


def load_covariance_spec(path):
    with open(path, encoding="utf-8") as fh:
        return parse_covariance_spec(fh.read())


def dump_covariance_spec(path, sigma, hbar_ref=1.0, mean=None):
    sigma = np.asarray(sigma, dtype=float)
    dim = sigma.shape[0]
    doc = {
        "n": dim // 2,
        "hbar_ref": float(hbar_ref),
        "mean": [float(v) for v in (np.zeros(dim) if mean is None else mean)],
        "sigma": [[float(v) for v in row] for row in sigma],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _parse_meta(line):
    m = _META.match(line.strip())
    if not m:
        raise ParseError("first line must be a '# hbar=... L=... N=...' header", "header")
    meta = {}
    for token in m.group(1).split():
        if "=" not in token:
            continue
        key, value = token.split("=", 1)
        meta[key] = value
    out = {}
    for key, conv in (("hbar", float), ("L", float), ("N", int)):
        if key not in meta:
            raise ParseError(f"header is missing '{key}'", key)
        try:
            out[key] = conv(meta[key])
        except ValueError as exc:
            raise ParseError(f"header field '{key}' is malformed: {meta[key]!r}", key) from exc
    if not out["hbar"] > 0:
        raise ParseError("header field 'hbar' must be positive", "hbar")
    return out


def _read_table(path, columns):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("file is empty", "header")
    meta = _parse_meta(lines[0])
    body = [ln for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("#")]
    if not body or [c.strip() for c in body[0].split(",")] != columns:
        raise ParseError(f"expected column header '{','.join(columns)}'", "columns")
    try:
        data = np.array([[float(v) for v in ln.split(",")] for ln in body[1:]])
    except ValueError as exc:
        raise ParseError(f"non-numeric value in data rows: {exc}", "data") from exc
    if data.ndim != 2 or data.shape[1] != len(columns):
        raise ParseError(f"every data row must have {len(columns)} values", "data")
    if not np.all(np.isfinite(data)):
        raise ParseError("data rows contain non-finite values", "data")
    try:
        grid = PositionGrid(meta["L"], meta["N"])
    except ValueError as exc:
        raise ParseError(str(exc), "N") from exc
    return meta, grid, data


def _check_axis(actual, expected, name, scale):
    if actual.shape != expected.shape or np.abs(actual - expected).max() > 1e-9 * max(1.0, scale):
        raise ParseError(f"column '{name}' does not match the grid declared in the header", name)


def write_wavefunction_csv(path, psi):
    lines = [f"# hbar={fmt(psi.hbar)} L={fmt(psi.grid.L)} N={psi.grid.N}", "x,re,im"]
    for x, v in zip(psi.grid.points, psi.values):
        lines.append(f"{fmt(x)},{fmt(v.real)},{fmt(v.imag)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_wavefunction_csv(path):
    """Read a wavefunction file; samples are taken as given (not renormalized)."""
    meta, grid, data = _read_table(path, ["x", "re", "im"])
    if data.shape[0] != grid.N:
        raise ParseError(f"expected {grid.N} rows, got {data.shape[0]}", "data")
    _check_axis(data[:, 0], grid.points, "x", grid.L)
    return GridWavefunction(grid, data[:, 1] + 1j * data[:, 2], meta["hbar"])


def write_wigner_csv(path, w):
    lines = [f"# hbar={fmt(w.hbar)} L={fmt(w.xgrid.L)} N={w.xgrid.N}", "x,p,w"]
    ps = [fmt(p) for p in w.pvalues]
    for x, row in zip(w.xvalues, w.w):
        sx = fmt(x)
        lines.extend(f"{sx},{sp},{fmt(v)}" for sp, v in zip(ps, row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_wigner_csv(path):
    meta, grid, data = _read_table(path, ["x", "p", "w"])
    n = grid.N
    if data.shape[0] != n * n:
        raise ParseError(f"expected {n * n} rows, got {data.shape[0]}", "data")
    xs = data[:, 0].reshape(n, n)
    ps = data[:, 1].reshape(n, n)
    _check_axis(xs[:, 0], grid.points, "x", grid.L)
    if np.abs(xs - xs[:, :1]).max() > 1e-9 * max(1.0, grid.L):
        raise ParseError("rows must be ordered with p varying fastest", "x")
    p_expected, _ = momentum_lattice(grid, meta["hbar"])
    _check_axis(ps[0], p_expected, "p", abs(p_expected).max())
    if np.abs(ps - ps[:1, :]).max() > 1e-9 * max(1.0, abs(p_expected).max()):
        raise ParseError("every x row must use the same momentum values", "p")
    return WignerGrid(grid, p_expected, data[:, 2].reshape(n, n), meta["hbar"])


def looks_like_json(path):
    with open(path, encoding="utf-8") as fh:
        head = fh.read(256).lstrip()
    return head.startswith("{")
