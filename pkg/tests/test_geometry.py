"""Tiles, substitution, and patch validation."""
import math
from collections import defaultdict

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from p2flis.geometry import (CORNER_SLOTS, DART, HALF_DART, HALF_KITE, KITE,
                             SEED_NAMES, VERTEX_COLOR, HalfTile, Patch, Tile,
                             deflate_half, inflate, make_patch, merge_halves,
                             seed_patch, validate_patch)
from p2flis.ring import (Cyclo10, PHI_ZETA, ZERO, ZETA_POW, cross_sign,
                         quad_sign, quad_times_phi, sq_abs)

coeff = st.integers(min_value=-8, max_value=8)
point = st.builds(Cyclo10, coeff, coeff, coeff, coeff)
halftile = st.builds(HalfTile, st.sampled_from((HALF_KITE, HALF_DART)), point,
                     st.integers(min_value=0, max_value=9),
                     st.sampled_from((1, -1)))


# -- prototile tables, confirmed against independent exact reductions -------

def interior_angles(outline) -> list[int]:
    """Interior angles of a simple polygon in units of 36 degrees (exact
    coordinates, measured numerically and snapped; all P2 angles are
    multiples of 36 so the snap is safe)."""
    n = len(outline)
    pts = [complex(p) for p in outline]
    ccw = _signed_area(pts) > 0
    out = []
    for i in range(n):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
        ang = (cmath_phase(a - b) - cmath_phase(c - b)) % (2 * math.pi)
        if not ccw:
            ang = 2 * math.pi - ang
        k = round(ang / (math.pi / 5))
        assert abs(ang - k * math.pi / 5) < 1e-9
        out.append(k)
    return out


def cmath_phase(z: complex) -> float:
    return math.atan2(z.imag, z.real)


def _signed_area(pts) -> float:
    s = 0.0
    for i in range(len(pts)):
        a, b = pts[i], pts[(i + 1) % len(pts)]
        s += a.real * b.imag - a.imag * b.real
    return s / 2


def test_kite_outline_table():
    k = Tile(KITE, ZERO, 0)
    assert k.outline == (ZERO, PHI_ZETA[1], PHI_ZETA[0], PHI_ZETA[9])
    # squared side lengths phi+1, 1, 1, phi+1 (pairs a + b*phi)
    sides = [sq_abs(b - a) for a, b in k.edges()]
    assert sides == [(1, 1), (1, 0), (1, 0), (1, 1)]
    # angles 72, 72, 144, 72
    assert interior_angles(k.outline) == [2, 2, 4, 2]


def test_dart_outline_table():
    d = Tile(DART, ZERO, 0)
    assert d.outline == (ZERO, PHI_ZETA[1], ZETA_POW[0], PHI_ZETA[9])
    sides = [sq_abs(b - a) for a, b in d.edges()]
    assert sides == [(1, 1), (1, 0), (1, 0), (1, 1)]
    # angles 72, 36, 216 (reflex), 36
    assert interior_angles(d.outline) == [2, 1, 6, 1]


def test_half_tile_shapes():
    hk = HalfTile(HALF_KITE, ZERO, 0, 1)
    t, b, c = hk.vertices
    assert [sq_abs(x) for x in (b - t, c - b, t - c)] == [(1, 1), (1, 0), (1, 1)]
    hd = HalfTile(HALF_DART, ZERO, 0, 1)
    t, b, c = hd.vertices
    assert [sq_abs(x) for x in (b - t, c - b, t - c)] == [(1, 1), (1, 0), (1, 0)]


@given(st.sampled_from((KITE, DART)), point, st.integers(0, 9))
def test_halves_cover_tile_corners(kind, p, r):
    tile = Tile(kind, p, r)
    h1, h2 = tile.halves()
    assert {v.coeffs for v in h1.vertices} | {v.coeffs for v in h2.vertices} \
        == {v.coeffs for v in tile.outline}
    assert h1.area2() == h2.area2()


# -- substitution -----------------------------------------------------------

def _inside_or_on(p, tri):
    a, b, c = tri
    s = cross_sign(b - a, c - a)
    return all(cross_sign(v - u, p - u) in (0, s)
               for u, v in ((a, b), (b, c), (c, a)))


@given(halftile)
@settings(max_examples=120)
def test_deflation_partitions_parent(h):
    kids = deflate_half(h)
    assert len(kids) == (3 if h.kind == HALF_KITE else 2)
    parent = [v.times_phi() for v in h.vertices]
    area = (0, 0)
    for k in kids:
        a2 = k.area2()
        area = (area[0] + a2[0], area[1] + a2[1])
        for v in k.vertices:
            assert _inside_or_on(v, parent)
    assert area == quad_times_phi(quad_times_phi(h.area2()))


def test_substitution_respects_symmetry():
    base = HalfTile(HALF_KITE, Cyclo10(1, 2, 0, -1), 3, 1)
    for k in range(10):
        assert sorted(map(repr, deflate_half(base.rotated(k)))) \
            == sorted(repr(c.rotated(k)) for c in deflate_half(base))
    assert sorted(map(repr, deflate_half(base.reflected()))) \
        == sorted(repr(c.reflected()) for c in deflate_half(base))


def test_single_kite_inflation():
    p = inflate(seed_patch("kite"))
    assert sorted(t.kind for t in p.tiles) == [KITE, KITE]
    assert len(p.halves) == 2
    assert all(h.kind == HALF_DART for h in p.halves)
    assert p.scale_exp == 1


def test_single_dart_inflation():
    p = inflate(seed_patch("dart"))
    assert [t.kind for t in p.tiles] == [KITE]
    assert len(p.halves) == 2
    assert all(h.kind == HALF_DART for h in p.halves)


def test_sun_half_tile_counts():
    expect = [(10, 0), (20, 10), (50, 30), (130, 80), (340, 210), (890, 550)]
    p = seed_patch("sun")
    for lvl, (nk, nd) in enumerate(expect):
        kinds = [h.kind for _, h in p.all_halves()]
        assert (kinds.count(HALF_KITE), kinds.count(HALF_DART)) == (nk, nd), lvl
        p = inflate(p)


def test_count_recurrence_all_seeds():
    for name in SEED_NAMES:
        p = seed_patch(name)
        for _ in range(5):
            kinds = [h.kind for _, h in p.all_halves()]
            a, b = kinds.count(HALF_KITE), kinds.count(HALF_DART)
            p = inflate(p)
            kinds = [h.kind for _, h in p.all_halves()]
            assert (kinds.count(HALF_KITE), kinds.count(HALF_DART)) \
                == (2 * a + b, a + b)


def test_area_conserved_up_to_scale():
    for name in SEED_NAMES:
        a = seed_patch(name).area2()
        p = inflate(seed_patch(name), 4)
        for _ in range(8):
            a = quad_times_phi(a)
        assert p.area2() == a


def test_inflation_is_deterministic():
    a = inflate(seed_patch("sun"), 3)
    b = inflate(seed_patch("sun"), 3)
    assert a == b
    assert [t for t in a.tiles] == sorted(a.tiles, key=lambda t:
                                          (t.anchor.coeffs, t.kind, t.rot))


def test_merge_rebuilds_whole_tiles():
    tiles = [Tile(KITE, Cyclo10(2, 1, 0, 0), 4), Tile(DART, ZERO, 7)]
    halves = [h for t in tiles for h in t.halves()]
    rebuilt, loose = merge_halves(halves)
    assert sorted(rebuilt, key=repr) == sorted(tiles, key=repr)
    assert loose == []
    some, rest = merge_halves(halves[:-1])
    assert len(some) == 1 and len(rest) == 1


# -- validation -------------------------------------------------------------

@pytest.mark.parametrize("name", SEED_NAMES)
@pytest.mark.parametrize("level", [0, 2, 4])
def test_generated_patches_are_valid(name, level):
    assert validate_patch(inflate(seed_patch(name), level)) == []


def test_mismatched_long_edge_glue():
    # two kites sharing a long edge tip-to-side: one matching-rule breach
    p = make_patch([Tile(KITE, ZERO, 0), Tile(KITE, PHI_ZETA[1], 5)])
    v = validate_patch(p)
    assert [x.kind for x in v] == ["matching_rule"]
    assert v[0].owners == ("t0", "t1")


def test_aligned_long_edge_glue_is_valid():
    # tip-to-tip long edge contact, as in the sun: no violations
    p = make_patch([Tile(KITE, ZERO, 0), Tile(KITE, ZERO, 2)])
    assert validate_patch(p) == []


def test_overlap_detected():
    p = make_patch([Tile(KITE, ZERO, 0), Tile(KITE, ZERO, 1)])
    assert any(x.kind == "overlap" for x in validate_patch(p))


def test_duplicate_detected():
    p = Patch((Tile(KITE, ZERO, 0), Tile(KITE, ZERO, 0)), (), 0)
    v = validate_patch(p)
    assert any(x.detail == "duplicate piece" for x in v)


def test_partial_edge_detected():
    # second kite's tip lands strictly inside the first kite's long edge
    p = make_patch([Tile(KITE, ZERO, 0), Tile(KITE, ZETA_POW[1], 3)])
    assert any(x.kind == "partial_edge" for x in validate_patch(p))


def test_loose_half_keeps_patch_valid():
    p = inflate(seed_patch("kite"), 2)
    assert len(p.halves) > 0
    assert validate_patch(p) == []


# -- matching-rule colors are forced by the substitution --------------------

def test_vertex_colors_rederived_from_patches():
    whole = {HALF_KITE: KITE, HALF_DART: DART}
    labels = sorted(VERTEX_COLOR)
    parent = {l: l for l in labels}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for name in SEED_NAMES:
        p = inflate(seed_patch(name), 4)
        at_vertex = defaultdict(set)
        for _, h in p.all_halves():
            for v, slot in zip(h.vertices, h.slots):
                at_vertex[v.coeffs].add((whole[h.kind], slot))
        for group in at_vertex.values():
            first, *others = sorted(group)
            for o in others:
                ra, rb = find(first), find(o)
                if ra != rb:
                    parent[ra] = rb

    classes = defaultdict(set)
    for l in labels:
        classes[find(l)].add(l)
    derived = {frozenset(c) for c in classes.values()}
    by_color = defaultdict(set)
    for label, col in VERTEX_COLOR.items():
        by_color[col].add(label)
    assert derived == {frozenset(c) for c in by_color.values()}


def test_corner_slots_consistent():
    for kind in (KITE, DART):
        t = Tile(kind, ZERO, 0)
        for slot, p in zip(CORNER_SLOTS[kind], t.outline):
            assert t.corner(slot) == p
