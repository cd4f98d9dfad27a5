"""Sequence files: one JSON header line followed by one byte per symbol.

The header holds ``format``, ``version``, the ordered ``alphabet`` (``null``
marks an unfilled cell), ``length`` and a free ``meta`` map.  Each payload
byte is an index into the alphabet.  Fillings may carry an ``.steps.npz``
sidecar with the per-cell step and initial flags so their declared
structure survives a round trip.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .builder import PartialFilling
from .odometer import parse_scale

FORMAT = "toeplitz-seq"
VERSION = 1


class SequenceFormatError(ValueError):
    pass


def write_sequence(path, x, meta=None, unfilled=None):
    """Write ``x`` (small integers); cells flagged in ``unfilled`` map to ``null``."""
    x = np.asarray(x, dtype=np.int64)
    if x.ndim != 1:
        raise ValueError("sequence must be one-dimensional")
    holes = np.zeros(x.size, dtype=bool) if unfilled is None else np.asarray(unfilled, bool)
    values = np.unique(x[~holes]).tolist()
    alphabet = values + ([None] if holes.any() else [])
    if len(alphabet) > 256:
        raise ValueError(f"alphabet of {len(alphabet)} symbols does not fit in one byte")
    payload = np.searchsorted(np.asarray(values, dtype=np.int64), x).astype(np.uint8)
    payload[holes] = len(values)
    header = {
        "format": FORMAT,
        "version": VERSION,
        "alphabet": alphabet,
        "length": int(x.size),
        "meta": meta or {},
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(payload.tobytes())


def read_sequence(path):
    """Return ``(symbols, unfilled_mask, header)``; unfilled cells read as 0."""
    data = Path(path).read_bytes()
    nl = data.find(b"\n")
    if nl < 0:
        raise SequenceFormatError(f"{path}: missing header line")
    try:
        header = json.loads(data[:nl])
    except json.JSONDecodeError as exc:
        raise SequenceFormatError(f"{path}: header is not JSON") from exc
    if not isinstance(header, dict) or header.get("format") != FORMAT:
        raise SequenceFormatError(f"{path}: not a {FORMAT} file")
    if header.get("version") != VERSION:
        raise SequenceFormatError(f"{path}: unsupported version {header.get('version')}")
    alphabet = header.get("alphabet")
    length = header.get("length")
    if not isinstance(alphabet, list) or not isinstance(length, int):
        raise SequenceFormatError(f"{path}: malformed header")
    payload = np.frombuffer(data[nl + 1 :], dtype=np.uint8)
    if payload.size != length:
        raise SequenceFormatError(f"{path}: payload has {payload.size} bytes, header says {length}")
    if payload.size and payload.max() >= len(alphabet):
        raise SequenceFormatError(f"{path}: byte outside the alphabet")
    lut = np.asarray([0 if a is None else a for a in alphabet], dtype=np.int64)
    holes_lut = np.asarray([a is None for a in alphabet], dtype=bool)
    return lut[payload], holes_lut[payload] if holes_lut.size else np.zeros(0, bool), header


def _sidecar(path):
    return Path(str(path) + ".steps.npz")


def write_filling(path, filling, meta=None):
    """Write the symbols of a filling plus its step sidecar."""
    meta = dict(meta or {})
    meta.setdefault("construction", filling.kind)
    if filling.scale is not None:
        meta.setdefault("scale", filling.scale.descriptor)
    write_sequence(path, filling.symbol, meta, unfilled=~filling.filled)
    periods = np.asarray(
        [-1 if r.period is None else r.period for r in filling.records], dtype=np.int64
    )
    np.savez_compressed(
        _sidecar(path),
        step=filling.step,
        initial=filling.initial,
        first=filling.first_positions,
        period=periods,
        cells=np.asarray([r.cells for r in filling.records], dtype=np.int64),
    )


def read_filling(path):
    """Inverse of :func:`write_filling`; needs the sidecar."""
    x, holes, header = read_sequence(path)
    side = _sidecar(path)
    if not side.exists():
        raise SequenceFormatError(f"{path}: no step sidecar {side.name}")
    meta = header.get("meta", {})
    scale = parse_scale(meta["scale"], bound=x.size) if "scale" in meta else None
    f = PartialFilling(x.size, scale, meta.get("construction", "custom"))
    with np.load(side) as npz:
        f.step = npz["step"].astype(np.int64)
        f.initial = npz["initial"].astype(bool)
        f._first = npz["first"].tolist()
        f._period = [None if p < 0 else int(p) for p in npz["period"].tolist()]
        f._cells = npz["cells"].tolist()
    if f.step.size != x.size or np.any((f.step == 0) != holes):
        raise SequenceFormatError(f"{path}: sidecar disagrees with the payload")
    f.symbol = x
    return f, header


def write_z(path, filling):
    """The initial indicator of a complete filling as its own sequence file."""
    z = filling.initial.astype(np.int64)
    write_sequence(path, z, {"construction": "initial-indicator"})
