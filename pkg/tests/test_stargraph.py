"""Star/sun detection, overlay graph, faces, and coloring tests.

Detection is checked against an independent corner-incidence oracle that
never looks at tile anchors.  The overlay's structure is pinned by exact
facts: the shared edge length is phi^8 (squared), sun centers become star
centers one level up under scaling by phi, and the red stars of level k
are precisely the phi^2-images of all stars of level k-2.
"""
from __future__ import annotations

from collections import Counter

import pytest

from p2flis.dualgraph import build_dual
from p2flis.geometry import DART, KITE, Patch, inflate, make_patch, seed_patch
from p2flis.ring import Cyclo10, quad_sign, sq_abs
from p2flis.stargraph import (
    Sun,
    StarGraph,
    StarVertex,
    bounded_faces,
    build_star_graph,
    classify_face,
    color_star_vertices,
    detect_stars_and_suns,
    face_area2,
    face_census,
    faces,
)


def level(name: str, k: int):
    p = inflate(seed_patch(name), k)
    return p, build_dual(p)


def detect(name: str, k: int):
    p, g = level(name, k)
    return p, g, *detect_stars_and_suns(p, g)


# ---------------------------------------------------------------------------
# detection
# ---------------------------------------------------------------------------

def test_seed_patches():
    p, g = level("star", 0)
    stars, suns = detect_stars_and_suns(p, g)
    assert len(stars) == 1 and len(suns) == 0
    assert stars[0].center == Cyclo10(0, 0, 0, 0)
    assert stars[0].star_tiles == (0, 1, 2, 3, 4)
    assert stars[0].sun_count is None and stars[0].color is None
    p, g = level("sun", 0)
    stars, suns = detect_stars_and_suns(p, g)
    assert len(stars) == 0 and len(suns) == 1
    assert suns[0].kite_tiles == (0, 1, 2, 3, 4)


def corner_incidence_oracle(p: Patch):
    """Count 5-dart and 5-kite tip meetings from raw corner coordinates,
    without using the anchor bookkeeping of the detector."""
    at_point: dict = {}
    for i, t in enumerate(p.tiles):
        for slot in ("tip", "side1", "far", "reflex", "side2"):
            try:
                c = t.corner(slot)
            except ValueError:
                continue
            at_point.setdefault(c.coeffs, []).append((i, t.kind, slot))
    stars = suns = 0
    for _, inc in at_point.items():
        tips = [(i, kind) for i, kind, slot in inc if slot == "tip"]
        if len(tips) == 5:
            kinds = {kind for _, kind in tips}
            if kinds == {DART}:
                stars += 1
            elif kinds == {KITE}:
                suns += 1
    return stars, suns


@pytest.mark.parametrize("k", [2, 3, 4])
def test_detection_matches_corner_oracle(k):
    p, g, stars, suns = detect("sun", k)
    o_stars, o_suns = corner_incidence_oracle(p)
    assert (len(stars), len(suns)) == (o_stars, o_suns)


def test_known_counts_by_level():
    counts = {}
    for k in range(2, 7):
        _, _, stars, suns = detect("sun", k)
        counts[k] = (len(stars), len(suns))
    assert counts == {2: (0, 1), 3: (1, 5), 4: (5, 16), 5: (16, 40),
                      6: (40, 111)}
    # suns turn into stars one level down the substitution
    for k in range(3, 7):
        assert counts[k][0] == counts[k - 1][1]


def test_deflation_maps_suns_to_stars_exactly():
    prev = detect("sun", 4)
    for k in (5, 6):
        cur = detect("sun", k)
        sun_images = {s.center.times_phi().coeffs for s in prev[3]}
        star_centers = {s.center.coeffs for s in cur[2]}
        assert sun_images == star_centers
        star_images = {s.center.times_phi().coeffs for s in prev[2]}
        sun_centers = {s.center.coeffs for s in cur[3]}
        assert star_images <= sun_centers
        prev = cur


def test_star_darts_form_dual_cycle():
    p, g, stars, _ = detect("sun", 5)
    assert stars
    for s in stars:
        ids = s.star_tiles
        assert len(ids) == 5
        assert all(p.tiles[i].kind == DART for i in ids)
        for a in ids:
            deg_in = sum(1 for b in ids if b != a and g.has_edge(a, b))
            assert deg_in == 2


def test_detection_isometry_invariant():
    p, g, stars, suns = detect("sun", 3)
    shift = Cyclo10(2, -1, 0, 3)
    moved = make_patch([t.rotated(3).translated(shift) for t in p.tiles],
                       scale_exp=p.scale_exp)
    g2 = build_dual(moved)
    stars2, suns2 = detect_stars_and_suns(moved, g2)
    assert len(stars2) == len(stars) and len(suns2) == len(suns)
    want = {s.center.rotated(3).coeffs for s in stars} or set()
    want = {(Cyclo10(*c) + shift).coeffs for c in want}
    assert {s.center.coeffs for s in stars2} == want


def test_mismatched_graph_rejected():
    p, g, _, _ = detect("sun", 3)
    q, h = level("sun", 4)
    with pytest.raises(ValueError):
        detect_stars_and_suns(p, h)


# ---------------------------------------------------------------------------
# overlay graph
# ---------------------------------------------------------------------------

def test_no_stars_is_an_error():
    p, g = level("sun", 0)
    stars, _ = detect_stars_and_suns(p, g)
    with pytest.raises(ValueError):
        build_star_graph(p, stars)


def test_single_star_graph():
    p, g = level("star", 0)
    stars, _ = detect_stars_and_suns(p, g)
    sg = build_star_graph(p, stars)
    assert sg.n == 1 and sg.edges == () and sg.d0 is None


@pytest.mark.parametrize("k", [5, 6, 7])
def test_edge_length_is_phi_to_the_eighth(k):
    p, g, stars, _ = detect("sun", k)
    sg = build_star_graph(p, stars)
    assert sg.d0 == (13, 21)  # phi^8 = 13 + 21 phi
    for a, b in sg.edges:
        d = sq_abs(sg.vertices[a].center - sg.vertices[b].center)
        assert d == sg.d0


def test_overlay_shape_by_level():
    p, g, stars, _ = detect("sun", 6)
    sg = build_star_graph(p, stars)
    assert (sg.n, len(sg.edges)) == (40, 45)
    degs = Counter(len(sg.neighbors(i)) for i in range(sg.n))
    assert max(degs) <= 5


# ---------------------------------------------------------------------------
# faces
# ---------------------------------------------------------------------------

def test_face_census_shapes():
    # (edges, reflex corners): hexagon, boat, and star shapes only
    p, g, stars, _ = detect("sun", 6)
    sg = build_star_graph(p, stars)
    assert face_census(sg) == {(8, 2): 5, (10, 5): 1}
    p, g, stars, _ = detect("sun", 7)
    sg = build_star_graph(p, stars)
    assert face_census(sg) == {(6, 0): 15, (8, 2): 10, (10, 5): 5}


@pytest.mark.parametrize("k", [6, 7])
def test_euler_formula(k):
    p, g, stars, _ = detect("sun", k)
    sg = build_star_graph(p, stars)
    all_faces = faces(sg)
    # connected straight-line embedding: V - E + F = 2
    assert sg.n - len(sg.edges) + len(all_faces) == 2
    negative = [f for f in all_faces if quad_sign(*face_area2(sg, f)) < 0]
    assert len(negative) == 1  # exactly one outer face
    assert len(bounded_faces(sg)) == len(all_faces) - 1


def test_tree_overlay_has_no_bounded_faces():
    p, g, stars, _ = detect("sun", 5)
    sg = build_star_graph(p, stars)
    assert len(sg.edges) == sg.n - 1
    assert bounded_faces(sg) == []


# ---------------------------------------------------------------------------
# colors
# ---------------------------------------------------------------------------

def test_isolated_star_is_red():
    p, g = level("star", 0)
    stars, suns = detect_stars_and_suns(p, g)
    sg = color_star_vertices(build_star_graph(p, stars), suns, g)
    assert sg.vertices[0].sun_count == 0
    assert sg.vertices[0].color == "R"


def colored_overlay(k: int) -> StarGraph:
    p, g, stars, suns = detect("sun", k)
    return color_star_vertices(build_star_graph(p, stars), suns, g)


@pytest.mark.parametrize("k", [5, 6, 7])
def test_sun_counts_within_range(k):
    sg = colored_overlay(k)
    for v in sg.vertices:
        assert v.sun_count in (0, 1, 2)
        assert v.color == {0: "R", 1: "G", 2: "B"}[v.sun_count]


def test_color_histograms():
    assert Counter(v.color for v in colored_overlay(6).vertices) == \
        Counter(B=25, G=10, R=5)
    assert Counter(v.color for v in colored_overlay(7).vertices) == \
        Counter(B=60, G=35, R=16)


def test_histogram_frequencies_stable_between_levels():
    a = Counter(v.color for v in colored_overlay(6).vertices)
    b = Counter(v.color for v in colored_overlay(7).vertices)
    ta, tb = sum(a.values()), sum(b.values())
    for c in "RGB":
        assert abs(a[c] / ta - b[c] / tb) < 0.15


def test_red_stars_are_images_of_older_stars():
    """A star center two levels old always ends up red: its neighborhood
    deflates into dart-heavy structure with no complete sun adjacent."""
    for lo, hi in ((4, 6), (5, 7)):
        _, _, stars_lo, _ = detect("sun", lo)
        sg_hi = colored_overlay(hi)
        images = {s.center.times_phi().times_phi().coeffs for s in stars_lo}
        reds = {v.center.coeffs for v in sg_hi.vertices if v.color == "R"}
        assert images == reds
