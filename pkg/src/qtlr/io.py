"""Frame and tensor file I/O, mask and noise synthesis, report writers."""
from __future__ import annotations

import csv
import json
import math
import struct
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DomainError, MixedDimensions, ShapeMismatch, UnreadableFile
from .quaternion import QTensor

MAGIC = b"QTEN1"
REPORT_HEADER = ("frame", "psnr_db", "ssim", "method", "seconds")


# -- PNG frames --------------------------------------------------------------

def ingest_frames(directory) -> QTensor:
    """Read ``*.png`` frames (lexicographic order) into a pure H x W x T tensor.

    R, G, B land on the i, j, k components with values in [0, 255].
    """
    d = Path(directory)
    if not d.is_dir():
        raise UnreadableFile(f"{d} is not a directory")
    files = sorted(p for p in d.iterdir() if p.suffix.lower() == ".png")
    if not files:
        raise UnreadableFile(f"no PNG frames in {d}")
    frames = []
    for f in files:
        try:
            with Image.open(f) as im:
                frames.append(np.asarray(im.convert("RGB"), dtype=np.float64))
        except (OSError, UnidentifiedImageError) as exc:
            raise UnreadableFile(f"cannot read {f}: {exc}") from None
        if frames[-1].shape != frames[0].shape:
            raise MixedDimensions(f"{f.name} is {frames[-1].shape[:2]}, expected {frames[0].shape[:2]}")
    rgb = np.stack(frames, axis=-1)  # H, W, 3, T
    return QTensor.pure(rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2])


def to_uint8(T: QTensor) -> np.ndarray:
    """``(H, W, 3, frames)`` uint8 array from the i/j/k components."""
    d = T.data[1:]
    d = d.reshape(d.shape[:3] + (-1,), order="F")
    return np.clip(np.rint(np.moveaxis(d, 0, 2)), 0, 255).astype(np.uint8)


def export_frames(T: QTensor, directory, prefix: str = "frame") -> list:
    """Write one PNG per frame (clamped and rounded); returns the paths."""
    if T.ndim < 2:
        raise ShapeMismatch("need at least H x W to export frames")
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    pix = to_uint8(T)
    paths = []
    for t in range(pix.shape[3]):
        p = d / f"{prefix}_{t:04d}.png"
        Image.fromarray(np.ascontiguousarray(pix[:, :, :, t])).save(p)
        paths.append(p)
    return paths


# -- binary tensor format ----------------------------------------------------

def write_qten(T: QTensor, path):
    """magic, u8 order, u64 LE extents, then w, x, y, z as LE float64, first index fastest."""
    shape = T.shape
    if len(shape) > 255:
        raise DomainError("order too large for the file header")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<B", len(shape)))
        f.write(struct.pack(f"<{len(shape)}Q", *shape))
        f.write(T.flat().astype("<f8").tobytes())


def read_qten(path) -> QTensor:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc}") from None
    if len(raw) < 6 or raw[:5] != MAGIC:
        raise UnreadableFile(f"{path} is not a QTEN1 file")
    n = raw[5]
    head = 6 + 8 * n
    if len(raw) < head:
        raise UnreadableFile(f"{path}: truncated header")
    shape = struct.unpack_from(f"<{n}Q", raw, 6)
    count = int(np.prod(shape, dtype=np.int64))
    if len(raw) != head + 32 * count:
        raise UnreadableFile(f"{path}: expected {head + 32 * count} bytes, found {len(raw)}")
    comps = np.frombuffer(raw, dtype="<f8", offset=head).astype(np.float64)
    return QTensor.from_flat(comps.reshape(4, count), shape)


def load_tensor(path) -> QTensor:
    """A ``.qten`` file or a directory of PNG frames."""
    p = Path(path)
    if p.is_dir():
        return ingest_frames(p)
    return read_qten(p)


def save_tensor(T: QTensor, path):
    p = Path(path)
    if p.suffix == ".qten":
        write_qten(T, p)
    else:
        export_frames(T, p)


# -- masks and noise ---------------------------------------------------------

def make_mask(shape, missing_fraction: float, seed: int = 0, per_frame: bool = True) -> np.ndarray:
    """Boolean mask, True where observed.

    With ``per_frame`` exactly ``floor(fraction * H * W)`` entries of every
    frame (index over modes 3..N) are missing, drawn independently per frame.
    Otherwise ``floor(fraction * size)`` entries are missing overall.
    """
    if not (0 <= missing_fraction < 1):
        raise DomainError("missing fraction must lie in [0, 1)")
    shape = tuple(int(s) for s in shape)
    rng = np.random.default_rng(seed)
    if per_frame and len(shape) >= 2:
        hw = shape[0] * shape[1]
        frames = int(np.prod(shape[2:], dtype=np.int64))
        k = int(math.floor(missing_fraction * hw))
        m = np.ones((hw, frames), dtype=bool)
        for t in range(frames):
            m[rng.choice(hw, size=k, replace=False), t] = False
        return m.reshape(shape, order="F")
    n = int(np.prod(shape, dtype=np.int64))
    m = np.ones(n, dtype=bool)
    m[rng.choice(n, size=int(math.floor(missing_fraction * n)), replace=False)] = False
    return m.reshape(shape, order="F")


def add_noise(T: QTensor, kind: str, level: float, seed: int = 0) -> QTensor:
    """Gaussian noise of std ``level * 255`` on i/j/k, or salt-and-pepper.

    ``salt`` picks exactly ``floor(level * size)`` entries and sets each of
    their three colour channels to 0 or 255 at random.
    """
    if level < 0:
        raise DomainError("noise level must be nonnegative")
    rng = np.random.default_rng(seed)
    out = T.data.copy()
    if kind == "gaussian":
        if level > 0:
            out[1:] += rng.normal(0.0, level * 255.0, size=out[1:].shape)
    elif kind == "salt":
        if level > 1:
            raise DomainError("salt level is a fraction in [0, 1]")
        n = T.size
        k = int(math.floor(level * n))
        pos = rng.choice(n, size=k, replace=False)
        flat = out.reshape(4, -1, order="F")
        flat[1:, pos] = 255.0 * rng.integers(0, 2, size=(3, k))
        out = flat.reshape(out.shape, order="F")
    else:
        raise DomainError(f"unknown noise kind {kind!r}")
    return QTensor._wrap(out)


# -- reports -----------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


def write_report(rows, path):
    """CSV with header ``frame,psnr_db,ssim,method,seconds``."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for r in rows:
            w.writerow([_fmt(r.get(k)) for k in REPORT_HEADER])


def read_report(path) -> list:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def write_iterations(report, path):
    rows = report.rows()
    if not rows:
        return
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(v) for k, v in r.items()})


def write_summary(config: dict, report, path):
    doc = {"config": config}
    doc.update(report.summary())
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True, default=str)
        f.write("\n")


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment. Keys use dashes or underscores."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UnreadableFile(f"cannot read config {path}: {exc}") from None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{n}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        if not k:
            raise DomainError(f"{path}:{n}: empty key")
        out[k.replace("-", "_")] = v
    return out
