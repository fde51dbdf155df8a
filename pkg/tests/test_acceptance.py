"""End-to-end acceptance checks.

Each test prints one `[Ann] PASS/FAIL` line (shown even when pytest captures
output) and then asserts.  Run alone with `pytest tests/test_acceptance.py -v`.
"""

import dataclasses
import math
import time

import numpy as np
import pytest

from conftest import NATURAL, natural_image
from oracles import angle_diff, oracle_weighted_gradients, ramp, sweep_orientation, twenty_point_scene
from stablesurf.bench import bench, time_call
from stablesurf.cli import main
from stablesurf.config import PRESETS
from stablesurf.descriptor import (
    DescriptorMethod,
    DescriptorStrategy,
    OrientationMethod,
    OrientationStrategy,
    describe_batch,
    describe_many,
    estimate_orientation_average,
    estimate_orientation_sliding,
    orientations,
)
from stablesurf.detector import (
    DetectorConfig,
    InterestPoint,
    build_response_pyramid,
    detect,
    detect_detailed,
    fit_independent1d,
    fit_quadratic3d,
    nonmax_suppress,
)
from stablesurf.evaluation import HomographySequence, descriptor_stability_protocol, modified_repeatability
from stablesurf.image import write_pgm
from stablesurf.integral import BorderPolicy, DerivativeKernel, KernelFamily, build_integral, rect_sum, trace_map
from stablesurf.synthetic import blob_grid, box_characteristic_scale, rotation_about, textured_image, warp

B = BorderPolicy.ZERO_RESPONSE


@pytest.fixture
def report(capsys):
    def emit(tag, title, ok, detail):
        with capsys.disabled():
            print(f"\n[{tag}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
        assert ok, f"{title}: {detail}"

    return emit


# -- integral image ----------------------------------------------------------------


def test_a01_integral_oracle(report):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    rects = total = mismatches = 0
    corners = [(0, 0, 63, 63), (0, 0, 0, 0), (63, 63, 63, 63), (0, 63, 63, 63), (17, 4, 17, 60)]
    for _ in range(50):
        img = rng.integers(0, 256, (64, 64)).astype(np.float64)
        ii = build_integral(img)
        xs = np.sort(rng.integers(0, 64, (10_000, 2)), axis=1)
        ys = np.sort(rng.integers(0, 64, (10_000, 2)), axis=1)
        cases = corners + [(x1, y1, x2, y2) for (x1, x2), (y1, y2) in zip(xs.tolist(), ys.tolist())]
        for x1, y1, x2, y2 in cases:
            mismatches += rect_sum(ii, x1, y1, x2, y2) != img[y1 : y2 + 1, x1 : x2 + 1].sum()
        rects += len(cases)
        total += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 10.0
    report("A01", "integral-image oracle", ok, f"{total} images, {rects} rects, {mismatches} mismatches, {elapsed:.2f}s")


# -- split vs naive ----------------------------------------------------------------


def test_a02_split_equals_naive(report):
    rng = np.random.default_rng(202)
    combos = [(o, d) for o in OrientationMethod for d in DescriptorMethod]
    maps = descs = bad = 0
    for k in range(10):
        w, h = int(rng.integers(64, 97)), int(rng.integers(64, 97))
        if k % 2:
            img = rng.integers(0, 256, (h, w)).astype(np.float64)
        else:
            img = textured_image(w, h, seed=k)
        ii = build_integral(img)
        family = list(KernelFamily)[k % 2]
        pts = [InterestPoint(rng.uniform(0, w - 1), rng.uniform(0, h - 1), rng.uniform(1.2, 3.0)) for _ in range(10)]
        pts += [InterestPoint(1.0, 2.0, 2.0), InterestPoint(w - 1.5, h - 1.2, 1.6)]
        for policy in BorderPolicy:
            cfg = DetectorConfig(octaves=3, border=policy)
            for a, b in zip(build_response_pyramid(ii, cfg).maps, build_response_pyramid(ii, cfg, naive=True).maps):
                bad += not np.array_equal(a, b)
                maps += 1
            for orient, method in combos:
                v = dataclasses.replace(
                    PRESETS["stable"](), border=policy, kernel=DerivativeKernel(family),
                    orientation=OrientationStrategy(orient), descriptor=DescriptorStrategy(method),
                )
                fast, slow = describe_batch(ii, pts, v), describe_batch(ii, pts, v, naive=True)
                bad += (fast.dropped_zero, fast.dropped_border) != (slow.dropped_zero, slow.dropped_border)
                for (p, a), (q, b) in zip(fast.features, slow.features):
                    bad += p != q or a.orientation != b.orientation or not np.array_equal(a.values, b.values)
                    descs += 1
    report("A02", "split == naive", bad == 0, f"{maps} response maps, {descs} descriptors, {bad} differences")


# -- detector -------------------------------------------------------------------------


def test_a03_blob_localisation(report):
    img, blobs = blob_grid(sigma_min=3.1, sigma_max=13.5, cell=128)
    cfg = DetectorConfig(response_threshold=100.0)
    dets = detect_detailed(img, cfg)
    pts = [d.point for d in dets]
    xy = np.array([(p.x, p.y) for p in pts])
    worst_d = worst_s = 0.0
    for b in blobs:
        d = np.hypot(xy[:, 0] - b.x, xy[:, 1] - b.y)
        p = pts[int(d.argmin())]
        truth = box_characteristic_scale(b.sigma)
        worst_d = max(worst_d, d.min())
        worst_s = max(worst_s, abs(p.scale - truth) / truth)
    centres = np.array([(b.x, b.y) for b in blobs])
    stray = sum(np.hypot(centres[:, 0] - p.x, centres[:, 1] - p.y).min() >= 1.5 for p in pts)
    octaves = sorted({d.seed.octave for d in dets})
    ok = worst_d < 1.5 and worst_s <= 0.25 and stray == 0 and len(octaves) >= 3
    report("A03", "blob localisation", ok,
           f"{len(blobs)} blobs, octaves {octaves}, worst offset {worst_d:.3f}px, "
           f"worst scale error {worst_s:.3f}, {stray} background extrema")


def test_a04_interpolation_containment(report):
    rng = np.random.default_rng(404)
    cubes = []
    for name in NATURAL:
        pyr = build_response_pyramid(build_integral(natural_image(name, (320, 320))), DetectorConfig())
        for e in nonmax_suppress(pyr):
            R = pyr.octaves[e.octave].responses
            cubes.append(R[e.layer - 1 : e.layer + 2, e.row - 1 : e.row + 2, e.col - 1 : e.col + 2])
    picked = rng.choice(len(cubes), size=1000, replace=False)
    worst = max(np.abs(fit_independent1d(cubes[i])).max() for i in picked)
    s, y, x = np.meshgrid([-1, 0, 1], [-1, 0, 1], [-1, 0, 1], indexing="ij")
    gap = 0.0
    for _ in range(1000):
        px, py, ps = rng.uniform(-0.5, 0.5, 3)
        cx, cy, cs = rng.uniform(0.1, 5.0, 3)
        cube = rng.uniform(-100, 100) - cx * (x - px) ** 2 - cy * (y - py) ** 2 - cs * (s - ps) ** 2
        gap = max(gap, np.abs(fit_independent1d(cube) - fit_quadratic3d(cube)).max())
    ok = worst < 0.5 and gap <= 1e-9
    report("A04", "interpolation containment", ok,
           f"{len(cubes)} extrema, 1000 sampled, max |offset| {worst:.4f}; 1000 quadratics, max fit gap {gap:.2e}")


def test_a05_lazy_sign(report):
    total = agree = 0
    for name in NATURAL:
        img = natural_image(name, (300, 300))
        cfg = DetectorConfig()
        ii = build_integral(img)
        eager = {}
        for d in detect_detailed(img, cfg, ii=ii):
            e = d.seed
            key = (e.octave, e.layer)
            if key not in eager:
                eager[key] = trace_map(ii, int(cfg.filter_size(*key)), cfg.step(e.octave), cfg.border)
            agree += d.point.sign == int(np.sign(eager[key][e.row, e.col]))
            total += 1
    report("A05", "lazy Laplacian sign", total > 0 and agree == total, f"{agree}/{total} features agree on 5 images")


# -- descriptor -------------------------------------------------------------------


def interior_points(img, cfg, limit):
    h, w = img.shape
    pts = detect(img, cfg)
    return [p for p in pts if 18 * p.scale + 2 < min(p.x, p.y, w - 1 - p.x, h - 1 - p.y)][:limit]


def test_a06_descriptor_invariances(report):
    n = 0
    norm_err = contrast_err = 0.0
    offset_diffs = 0
    for name in NATURAL:
        img = natural_image(name, (300, 300))
        for preset in ("fast", "stable"):
            v = PRESETS[preset]()
            pts = interior_points(img, v.detector, 100)
            base = describe_batch(build_integral(img), pts, v)
            brighter = describe_batch(build_integral(img + 17.0), pts, v)
            scaled = describe_batch(build_integral(img * 1.5), pts, v)
            assert len(base.features) == len(brighter.features) == len(scaled.features)
            for (_, a), (_, b), (_, c) in zip(base.features, brighter.features, scaled.features):
                norm_err = max(norm_err, abs(np.linalg.norm(a.values) - 1.0))
                offset_diffs += not (np.array_equal(a.values, b.values) and a.orientation == b.orientation)
                contrast_err = max(contrast_err, np.abs(a.values - c.values).max())
                n += 1
    ok = n >= 500 and norm_err <= 1e-6 and offset_diffs == 0 and contrast_err < 1e-6
    report("A06", "descriptor invariances", ok,
           f"{n} features, max |norm-1| {norm_err:.1e}, {offset_diffs} changed by +17 offset, "
           f"max change under x1.5 {contrast_err:.1e}")


def test_a07_smoothness_ordering(report):
    rng = np.random.default_rng(707)
    disp = {m: [] for m in DescriptorMethod}
    for name in NATURAL:
        ii = build_integral(natural_image(name, (400, 400)))
        count = 60
        pts = [InterestPoint(rng.uniform(100, 300), rng.uniform(100, 300), math.exp(rng.uniform(math.log(1.6), math.log(8.0))))
               for _ in range(count)]
        angles = rng.uniform(-math.pi, math.pi, count)
        moved = [InterestPoint(p.x + 0.5, p.y, p.scale) for p in pts]
        for m in DescriptorMethod:
            a, _, _ = describe_many(ii, pts, angles, DescriptorStrategy(m))
            b, _, _ = describe_many(ii, moved, angles, DescriptorStrategy(m))
            disp[m].extend(np.linalg.norm(a - b, axis=1))
    n, o, b = (float(np.mean(disp[m])) for m in (DescriptorMethod.NEAREST, DescriptorMethod.OVERLAPPING,
                                                  DescriptorMethod.BILINEAR))
    gap = n - (o + b) / 2
    strict = (n - max(o, b)) / 2
    ok = b < n and o < n and abs(o - b) < gap / 2
    report("A07", "smoothness ordering", ok,
           f"{len(disp[DescriptorMethod.NEAREST])} features, mean displacement nearest {n:.4f} "
           f"overlapping {o:.4f} bilinear {b:.4f}; |O-B| {abs(o - b):.4f} vs half gap {gap / 2:.4f} "
           f"(half gap to the closer one: {strict:.4f})")


def test_a08_rotation_robustness(report):
    # camera is the designated pair; the other photos widen the check on the
    # 0.7 floor and feed a pooled ordering over all five
    cfg = DetectorConfig(max_features=1000)
    h = rotation_about(math.radians(30), 255.5, 255.5)
    scores = {}
    for name in NATURAL:
        img = natural_image(name, (512, 512))
        rot = np.clip(np.rint(warp(img, h)), 0, 255)
        seq = HomographySequence([img, rot], [np.eye(3), h])
        pts = [detect(img, cfg), detect(rot, cfg)]
        scores[name] = tuple(descriptor_stability_protocol(seq, pts, PRESETS[v](), 3.0)[0] for v in ("stable", "fast"))
    stable_cam, fast_cam = scores["camera"]
    pooled_stable = sum(s for s, _ in scores.values())
    pooled_fast = sum(f for _, f in scores.values())
    ok = (stable_cam >= fast_cam and pooled_stable >= pooled_fast
          and all(s >= 0.7 for s, _ in scores.values()))
    per = "; ".join(f"{n} {s:.3f}/{f:.3f}" for n, (s, f) in scores.items())
    report("A08", "30 degree rotation", ok,
           f"stable/fast correct fraction: {per}; pooled {pooled_stable:.3f}/{pooled_fast:.3f}")


# -- evaluation --------------------------------------------------------------------


def test_a09_modified_repeatability(report):
    ref, img2 = twenty_point_scene()
    res = modified_repeatability(ref, img2, np.eye(3), image_i_bounds=(200, 200))
    clean = ref[:15]
    identity = modified_repeatability(clean, clean, np.eye(3), image_i_bounds=(200, 200)).r
    t = img2[0]
    gamed = img2 + [InterestPoint(t.x + 0.5, t.y, 2.0), InterestPoint(t.x, t.y - 0.7, 2.0),
                    InterestPoint(t.x - 0.4, t.y + 0.4, 2.0)]
    gamed_r = modified_repeatability(ref, gamed, np.eye(3), image_i_bounds=(200, 200)).r
    counts = (res.n_points, res.n_matched, res.n_ignored)
    ok = counts == (18, 15, 3) and res.r == 12 / 15 and identity == 1.0 and gamed_r <= res.r
    report("A09", "modified repeatability", ok,
           f"|P|,|A|,|T| = {counts}, r = {res.r} (want 0.8), identity r = {identity}, with spurious cluster r = {gamed_r}")


# -- orientation ---------------------------------------------------------------------


def test_a10_orientation_oracle(report):
    rng = np.random.default_rng(1010)
    width = OrientationStrategy().window_step
    worst = 0.0
    for k in range(100):
        ii = build_integral(textured_image(96, 96, seed=k, smooth=rng.uniform(1.5, 4.0)))
        p = InterestPoint(rng.uniform(40, 56), rng.uniform(40, 56), rng.uniform(1.2, 3.0))
        want = sweep_orientation(oracle_weighted_gradients(ii, p), width)
        worst = max(worst, angle_diff(estimate_orientation_sliding(ii, p).angle, want))
    pure = 0.0
    for theta in np.linspace(-math.pi, math.pi, 24, endpoint=False) + 0.05:
        ii = build_integral(ramp(gx=math.cos(theta), gy=math.sin(theta)))
        p = InterestPoint(100.0, 100.0, rng.uniform(1.2, 3.0))
        a = estimate_orientation_sliding(ii, p).angle
        b = estimate_orientation_average(ii, p).angle
        pure = max(pure, angle_diff(a, b), angle_diff(a, theta), angle_diff(b, theta))
    ok = worst <= width and pure < 0.05
    report("A10", "orientation oracle", ok,
           f"100 patches, max sweep difference {worst:.4f} rad (bin width {width}); "
           f"24 pure gradients, max disagreement {pure:.2e} rad")


# -- timing ---------------------------------------------------------------------------


@pytest.mark.slow
def test_a11_speed_ordering(report):
    img = natural_image("astronaut", (680, 850))
    fast, stable = bench(img, [PRESETS["fast"](), PRESETS["stable"]()], "astronaut", outer=11, inner=10)
    ii = build_integral(img)
    pts = detect(img, PRESETS["stable"]().detector, ii=ii)
    _, avg_ms, _ = time_call(lambda: orientations(ii, pts, OrientationStrategy("average_gradient")), 11, 10)
    _, slide_ms, _ = time_call(lambda: orientations(ii, pts, OrientationStrategy("sliding_window")), 11, 10)
    ok = fast.median_ms < stable.median_ms and avg_ms < slide_ms
    report("A11", "speed ordering", ok,
           f"850x680, features fast {fast.feature_count} stable {stable.feature_count}; median ms fast "
           f"{fast.median_ms:.1f} < stable {stable.median_ms:.1f}; orientation only ({len(pts)} points) "
           f"average {avg_ms:.1f} < sliding {slide_ms:.1f}")


# -- CLI determinism -------------------------------------------------------------------


def test_a12_cli_determinism(report, tmp_path, capsys):
    img = tmp_path / "cam.pgm"
    write_pgm(img, natural_image("camera", (160, 160)))
    seq = tmp_path / "seq"
    assert main(["synth", str(seq), "--seed", "3", "--size", "128", "--count", "3"]) == 0
    capsys.readouterr()

    def run_all(out):
        out.mkdir()
        main(["synth", str(out / "seq"), "--seed", "9", "--size", "96", "--count", "2"])
        main(["synth", str(out / "blobs.pgm"), "--kind", "blobs"])
        main(["detect", str(img), "--config", "fast", "--out", str(out / "p.txt")])
        main(["describe", str(img), str(out / "p.txt"), "--config", "stable", "--out", str(out / "d.txt")])
        main(["evaluate", str(seq), "--out", str(out / "desc.csv")])
        main(["evaluate", str(seq), "--mode", "detector", "--out", str(out / "det.csv")])
        main(["bench", str(img), "--outer", "2", "--inner", "1", "--out", str(out / "bench.csv")])
        return capsys.readouterr()

    first, second = run_all(tmp_path / "a"), run_all(tmp_path / "b")
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    differing = []
    for rel in files:
        a, b = (tmp_path / "a" / rel).read_bytes(), (tmp_path / "b" / rel).read_bytes()
        if rel.name == "bench.csv":
            # wall-clock columns differ run to run; everything else must not
            a, b = ([(r[0], r[1], r[4]) for r in (ln.split(",") for ln in x.decode().splitlines())] for x in (a, b))
        if a != b:
            differing.append(str(rel))
    if first.out.replace(str(tmp_path / "a"), "") != second.out.replace(str(tmp_path / "b"), ""):
        differing.append("<stdout>")
    ok = len(files) == 11 and not differing
    report("A12", "CLI determinism", ok,
           f"{len(files)} output files from detect/describe/evaluate/bench/synth, differing: {differing or 'none'}")
