"""Grayscale image handling and Netpbm (PGM/PPM) file I/O."""

from __future__ import annotations

import os

import numpy as np

from .errors import InvalidInputError

# ITU-R BT.601 luma weights, used when a colour PPM is loaded.
_LUMA = np.array([0.299, 0.587, 0.114])


def as_gray(image) -> np.ndarray:
    """Validate an image and return it as a C-contiguous float64 (H, W) array."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidInputError(f"expected a 2D grayscale image, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError("image is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("image contains non-finite intensities")
    return np.ascontiguousarray(arr)


def _tokens(data: bytes, count: int, pos: int):
    """Read `count` whitespace-separated header tokens, skipping '#' comments."""
    out = []
    n = len(data)
    while len(out) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise InvalidInputError("truncated Netpbm header")
        out.append(data[start:pos])
    return out, pos


def decode_netpbm(data: bytes) -> np.ndarray:
    """Decode P2/P5 (gray) or P3/P6 (colour, converted to luma) bytes."""
    magic = data[:2]
    if magic not in (b"P2", b"P3", b"P5", b"P6"):
        raise InvalidInputError(f"unsupported image format (magic {magic!r})")
    (w, h, maxval), pos = _tokens(data, 3, 2)
    try:
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise InvalidInputError("malformed Netpbm header") from exc
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise InvalidInputError("invalid Netpbm dimensions or maxval")
    channels = 3 if magic in (b"P3", b"P6") else 1
    count = width * height * channels
    if magic in (b"P2", b"P3"):
        try:
            values = np.array(data[pos:].split()[:count], dtype=np.int64)
        except ValueError as exc:
            raise InvalidInputError("non-numeric pixel data") from exc
    else:
        pos += 1  # exactly one whitespace byte separates header and raster
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        values = np.frombuffer(data, dtype=dtype, count=-1, offset=pos)[:count]
    if values.size != count:
        raise InvalidInputError("truncated pixel data")
    pixels = values.astype(np.float64).reshape(height, width, channels)
    if channels == 3:
        return pixels @ _LUMA
    return pixels[:, :, 0]


def read_image(path: str | os.PathLike) -> np.ndarray:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InvalidInputError(f"cannot read image {path}: {exc.strerror}") from exc
    return decode_netpbm(data)


def write_pgm(path: str | os.PathLike, image) -> None:
    """Write an image as binary 8-bit PGM, rounding and clipping to [0, 255]."""
    arr = np.clip(np.rint(as_gray(image)), 0, 255).astype(np.uint8)
    h, w = arr.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(arr.tobytes())
