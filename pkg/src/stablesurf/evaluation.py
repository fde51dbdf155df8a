"""Homography sequences, modified repeatability and summary scoring."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

import numpy as np

from .association import associate, score_associations
from .descriptor import describe_batch
from .detector import detect
from .errors import InvalidInputError, MetricDomainError, PointAtInfinityError
from .image import as_gray, read_image
from .integral import build_integral


@dataclass
class HomographySequence:
    """Images 1..N plus homographies mapping image 1 onto image i (H_1 = I)."""

    images: list
    homographies: list
    name: str = "sequence"

    def __post_init__(self):
        if len(self.images) != len(self.homographies):
            raise InvalidInputError("need exactly one homography per image")
        hs = []
        for h in self.homographies:
            h = np.asarray(h, dtype=np.float64)
            if h.shape != (3, 3) or not np.all(np.isfinite(h)) or abs(np.linalg.det(h)) < 1e-12:
                raise InvalidInputError("homographies must be finite, invertible 3x3 matrices")
            hs.append(h)
        self.homographies = hs
        self.images = [as_gray(img) for img in self.images]

    def __len__(self):
        return len(self.images)


_IMG = re.compile(r"^img(\d+)\.(pgm|ppm|pnm)$")


def read_homography(path) -> np.ndarray:
    try:
        h = np.loadtxt(path, dtype=np.float64)
    except (OSError, ValueError) as exc:
        raise InvalidInputError(f"cannot read homography {path}: {exc}") from exc
    if h.shape != (3, 3):
        raise InvalidInputError(f"{path}: expected 3 rows of 3 numbers")
    return h


def load_sequence(directory) -> HomographySequence:
    """Load img1..imgN (PGM/PPM) and H1to2p..H1toNp from a directory."""
    if not os.path.isdir(directory):
        raise InvalidInputError(f"not a directory: {directory}")
    found = {}
    for fname in os.listdir(directory):
        m = _IMG.match(fname)
        if m:
            found[int(m.group(1))] = fname
    if not found:
        raise InvalidInputError(f"no img<N>.pgm files in {directory}")
    n = max(found)
    missing = [f"img{i}.pgm" for i in range(1, n + 1) if i not in found]
    missing += [f"H1to{i}p" for i in range(2, n + 1) if not os.path.isfile(os.path.join(directory, f"H1to{i}p"))]
    if missing:
        raise InvalidInputError(f"{directory} is missing: {', '.join(missing)}")
    images = [read_image(os.path.join(directory, found[i])) for i in range(1, n + 1)]
    hs = [np.eye(3)] + [read_homography(os.path.join(directory, f"H1to{i}p")) for i in range(2, n + 1)]
    return HomographySequence(images, hs, name=os.path.basename(os.path.normpath(directory)))


# -- geometry ---------------------------------------------------------------------


def project_point(h, x):
    """Apply a homography to an (x, y) point."""
    h = np.asarray(h, dtype=np.float64)
    px, py = float(x[0]), float(x[1])
    w = h[2, 0] * px + h[2, 1] * py + h[2, 2]
    if w == 0.0:
        raise PointAtInfinityError(f"({px}, {py}) maps to infinity")
    return ((h[0, 0] * px + h[0, 1] * py + h[0, 2]) / w, (h[1, 0] * px + h[1, 1] * py + h[1, 2]) / w)


def expected_scale(h, x) -> float:
    """Mean distance of the projected unit-distance neighbours from the projected point."""
    cx, cy = project_point(h, x)
    px, py = float(x[0]), float(x[1])
    dists = [
        np.hypot(qx - cx, qy - cy)
        for qx, qy in (project_point(h, (px + dx, py + dy)) for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)))
    ]
    return float(np.mean(dists))


# -- repeatability ----------------------------------------------------------------


@dataclass(frozen=True)
class RepeatabilityResult:
    r: float
    n_points: int  # |P|
    n_matched: int  # |A|
    n_ignored: int  # |T|
    epsilon_px: float
    epsilon_scale: float


def _inside(x, y, bounds):
    w, h = bounds
    return 0.0 <= x <= w - 1 and 0.0 <= y <= h - 1


def modified_repeatability(points_ref, points_i, h_i, eps_px: float = 1.5, eps_scale: float = 0.25,
                           image_i_bounds=None) -> RepeatabilityResult:
    """Repeatability that ignores ambiguous matches.

    P: reference points projecting inside image i (bounds = (width, height)).
    A: image-i points that are the nearest position-and-scale match of some
       point of P.  Position must be within eps_px (strict) of the projection,
       and scale within eps_scale relative to expected_scale * reference scale.
    T: points of A with some other image-i point closer than eps_px.
    r = (|A| - |T|) / (|P| - |T|).
    """
    pts = list(points_i)
    xy = np.array([(p.x, p.y) for p in pts], dtype=np.float64).reshape(-1, 2)
    sc = np.array([p.scale for p in pts], dtype=np.float64)
    n_points = 0
    matched = set()
    for a in points_ref:
        proj = project_point(h_i, (a.x, a.y))
        if image_i_bounds is not None and not _inside(*proj, image_i_bounds):
            continue
        n_points += 1
        if not pts:
            continue
        want = expected_scale(h_i, (a.x, a.y)) * a.scale
        d = np.hypot(xy[:, 0] - proj[0], xy[:, 1] - proj[1])
        ok = (d < eps_px) & (np.abs(sc - want) <= eps_scale * want)
        if ok.any():
            cand = np.nonzero(ok)[0]
            matched.add(int(cand[np.argmin(d[cand])]))
    ignored = 0
    for c in matched:
        d = np.hypot(xy[:, 0] - xy[c, 0], xy[:, 1] - xy[c, 1])
        d[c] = np.inf
        if np.any(d < eps_px):
            ignored += 1
    n_matched = len(matched)
    if not 0 <= ignored <= n_matched <= n_points:
        raise MetricDomainError(f"inconsistent counts |P|={n_points} |A|={n_matched} |T|={ignored}")
    if n_points == ignored:
        raise MetricDomainError(f"|P| = |T| = {n_points}: repeatability undefined")
    r = (n_matched - ignored) / (n_points - ignored)
    return RepeatabilityResult(r, n_points, n_matched, ignored, eps_px, eps_scale)


def summarize(scores: dict) -> dict:
    """Normalise per-variant totals by the best total.

    `scores` maps variant -> {key: value}; every variant must cover the same keys.
    """
    if not scores:
        return {}
    keys = None
    for name, per in scores.items():
        k = set(per)
        if keys is None:
            keys = k
        elif k != keys:
            raise InvalidInputError(f"variant {name!r} covers different images than the others")
    totals = {name: float(sum(per[k] for k in sorted(per))) for name, per in scores.items()}
    best = max(totals.values())
    if best <= 0:
        raise MetricDomainError("best total is not positive; cannot normalise")
    return {name: t / best for name, t in totals.items()}


# -- protocols --------------------------------------------------------------------


def describe_points(image, points, variant):
    """Describe fixed points; returns (points kept, descriptor matrix)."""
    res = describe_batch(build_integral(image), points, variant)
    kept = [p for p, _ in res.features]
    values = np.array([d.values for _, d in res.features]).reshape(-1, 64)
    return kept, values


def descriptor_stability_protocol(sequence: HomographySequence, points_per_image, variant,
                                  tol_px: float = 3.0) -> list:
    """Correct-association fraction between image 1 and each later image.

    `points_per_image` holds the externally detected points of every image.
    """
    if len(points_per_image) != len(sequence):
        raise InvalidInputError("need one point list per image")
    pa, da = describe_points(sequence.images[0], points_per_image[0], variant)
    out = []
    for i in range(1, len(sequence)):
        pb, db = describe_points(sequence.images[i], points_per_image[i], variant)
        matches = associate(da, db)
        out.append(score_associations(matches, pa, pb, sequence.homographies[i], tol_px))
    return out


def detector_stability_protocol(sequence: HomographySequence, detector_cfg, eps_px: float = 1.5,
                                eps_scale: float = 0.25) -> list:
    """Modified repeatability of image 1's detections in each later image."""
    points = [detect(img, detector_cfg) for img in sequence.images]
    out = []
    for i in range(1, len(sequence)):
        h, w = sequence.images[i].shape
        out.append(modified_repeatability(points[0], points[i], sequence.homographies[i], eps_px, eps_scale, (w, h)))
    return out
