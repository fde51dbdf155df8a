"""Interest-point and descriptor text files.

Points:       first line is the count, then one ``x y scale sign`` line each.
Descriptors:  first line is ``count 64``, then ``x y scale angle v1 ... v64``.
Floats are written with repr() so files round-trip exactly.
"""

from __future__ import annotations

import numpy as np

from .descriptor import Descriptor64
from .detector import InterestPoint
from .errors import InvalidInputError


def _read_lines(path):
    try:
        with open(path, encoding="ascii") as fh:
            return fh.read().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc


def _header(lines, path, width):
    if not lines:
        raise InvalidInputError(f"{path}:1: missing header")
    parts = lines[0].split()
    try:
        if len(parts) != width:
            raise ValueError
        values = [int(p) for p in parts]
    except ValueError:
        raise InvalidInputError(f"{path}:1: malformed header {lines[0]!r}") from None
    count = values[0]
    body = [ln for ln in lines[1:]]
    while body and not body[-1].strip():
        body.pop()
    if count < 0 or len(body) != count:
        raise InvalidInputError(f"{path}: header declares {count} entries but {len(body)} follow")
    return values, body


def write_points(path, points) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{len(points)}\n")
        for p in points:
            fh.write(f"{float(p.x)!r} {float(p.y)!r} {float(p.scale)!r} {int(p.sign)}\n")


def read_points(path) -> list:
    _, body = _header(_read_lines(path), path, 1)
    out = []
    for lineno, line in enumerate(body, start=2):
        parts = line.split()
        try:
            if len(parts) != 4:
                raise ValueError
            x, y, s = (float(v) for v in parts[:3])
            sign = int(parts[3])
            if not (np.isfinite([x, y, s]).all() and s > 0 and sign in (-1, 0, 1)):
                raise ValueError
        except ValueError:
            raise InvalidInputError(f"{path}:{lineno}: expected 'x y scale sign', got {line!r}") from None
        out.append(InterestPoint(x, y, s, sign))
    return out


def write_descriptors(path, features) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{len(features)} 64\n")
        for p, d in features:
            head = f"{float(p.x)!r} {float(p.y)!r} {float(p.scale)!r} {float(d.orientation)!r}"
            fh.write(head + " " + " ".join(repr(float(v)) for v in d.values) + "\n")


def read_descriptors(path) -> list:
    (_, dim), body = _header(_read_lines(path), path, 2)
    if dim != 64:
        raise InvalidInputError(f"{path}:1: expected dimension 64, got {dim}")
    out = []
    for lineno, line in enumerate(body, start=2):
        try:
            vals = [float(v) for v in line.split()]
            if len(vals) != 68:
                raise ValueError
        except ValueError:
            raise InvalidInputError(f"{path}:{lineno}: expected 68 numbers") from None
        out.append((InterestPoint(vals[0], vals[1], vals[2]), Descriptor64(np.array(vals[4:]), vals[3])))
    return out
