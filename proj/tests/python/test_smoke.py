"""Smoke tests for the _cartonsynth extension module.

Run with PYTHONPATH pointing at the build directory holding the .so
(the ctest registration does this automatically).
"""

import json

import pytest

cs = pytest.importorskip("_cartonsynth")

# Stacked-box fixture: 9 corners, 14 clicks, three visible surfaces.
CORNERS = {
    1: (100, 380), 2: (100, 100), 3: (200, 60), 4: (300, 100), 5: (200, 140),
    6: (300, 300), 7: (240, 340), 8: (200, 340), 9: (150, 380),
}
CLICK_ORDER = [1, 2, 3, 4, 6, 7, 8, 5, 2, 5, 4, 5, 8, 9]
BOX_CLICKS = [CORNERS[i] for i in CLICK_ORDER]
SQUARE = [(100.0, 100.0), (300.0, 100.0), (300.0, 300.0), (100.0, 300.0)]


def test_segment_surfaces_box():
    out = cs.segment_surfaces(BOX_CLICKS, occlusion="All", psi=25.0)
    assert len(out["loops"]) == 3
    assert len(out["common_lines"]) == 3
    assert len(out["unique_points"]) == 9
    assert all(len(poly) in (4, 5) for poly in out["polygons"])


def test_validate_instance():
    ok = cs.validate_instance(BOX_CLICKS, occlusion="All", psi=25.0)
    assert ok["ok"]
    assert not ok["violations"]
    # counter-clockwise square violates the clockwise rule
    bad = cs.validate_instance(list(reversed(SQUARE)), occlusion="All", psi=25.0)
    assert not bad["ok"]
    assert any(rule == "R2" for rule, _ in bad["violations"])


def test_reconstruct_contours_corner_cut():
    # corner-cut rectangle, large enough that psi=25 keeps the corners apart
    pentagon = [(0, 0), (200, 0), (200, 120), (160, 160), (0, 160)]
    out = cs.reconstruct_contours(pentagon, occlusion="Occlusion")
    (surface,) = out["surfaces"]
    assert surface["source"] == "parallelogram"
    xs = sorted(p[0] for p in surface["contour"])
    ys = sorted(p[1] for p in surface["contour"])
    assert xs == pytest.approx([0, 0, 200, 200])
    assert ys == pytest.approx([0, 0, 160, 160])


def test_solve_homography_identity():
    quad = [(3.0, 4.0), (120.0, 9.0), (131.0, 88.0), (7.0, 95.0)]
    m = cs.solve_homography(quad, quad)
    for i in range(3):
        for j in range(3):
            assert m[i][j] == pytest.approx(1.0 if i == j else 0.0, abs=1e-12)


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        cs.segment_surfaces([(0, 0), (1, 1)])  # too few points
    with pytest.raises(ValueError):
        cs.generate(bogus_key=1)


def test_generate_noise_only(tmp_path):
    from PIL import Image

    skel_dir = tmp_path / "skeletons"
    skel_dir.mkdir()
    Image.new("RGB", (64, 64), (40, 90, 160)).save(skel_dir / "source.png")
    record = {
        "image": "source.png",
        "width": 64,
        "height": 64,
        "instances": [
            {"id": 1, "occlusion": "All",
             "points": [[5, 5], [55, 5], [55, 55], [5, 55]]}
        ],
    }
    (skel_dir / "skel_000.json").write_text(json.dumps([record]))

    out_dir = tmp_path / "out"
    summary = cs.generate(skeletons=str(skel_dir), out=str(out_dir),
                          count=3, seed=11, noise_prob=1.0)
    assert summary["images"] == 3
    assert summary["instances_noise"] == 3
    assert summary["instances_failed"] == 0
    assert (out_dir / "synth_000002.png").exists()
    assert (out_dir / "annotations.json").exists()
    annotations = json.loads((out_dir / "annotations.json").read_text())
    assert len(annotations["annotations"]) == 3
