"""P2 tiles, patches, and the substitution (inflation) that generates them.

A patch is a finite set of kites and darts with exact Cyclo10 coordinates.
Tiles are built from half-tiles: a kite splits along its symmetry axis into
two golden triangles (36-72-72, sides phi, 1, phi), a dart into two gnomons
(36-36-108, sides phi, 1, 1).  Substitution is defined on half-tiles and
whole tiles are recovered by merging mirror pairs.

Coordinates are kept integral by rescaling: one inflation step maps a point
p to phi*p and increments the patch's scale_exp, so a stored coordinate c
at scale_exp = s represents the physical point c / phi**s.  Edge lengths at
storage scale are always phi (long) and 1 (short).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from .ring import (Cyclo10, PHI_ZETA, PHI2_ZETA, ZETA_POW, ZERO,
                   cross_area2, cross_sign, dot_sign, quad_sign)

KITE = "K"
DART = "D"
HALF_KITE = "HK"
HALF_DART = "HD"

#: corner slot names per tile kind, in outline order
CORNER_SLOTS = {
    KITE: ("tip", "side1", "far", "side2"),
    DART: ("tip", "side1", "reflex", "side2"),
}

#: Matching-rule vertex colors.  Two tiles may share an edge only if the
#: colors agree at both endpoints.  The partition is forced: these are
#: exactly the corner classes that coincide at vertices of substitution
#: generated patches (tests re-derive it by union-find over such patches).
VERTEX_COLOR = {
    (KITE, "tip"): "B", (KITE, "far"): "B", (DART, "side"): "B",
    (KITE, "side"): "W", (DART, "tip"): "W", (DART, "reflex"): "W",
}


@dataclass(frozen=True)
class HalfTile:
    """Half of a P2 tile (a Robinson triangle).

    kind is HALF_KITE or HALF_DART.  tip is the corner on the parent
    tile's tip, rot the direction index (multiples of 36 degrees) of the
    symmetry axis, and chirality +1/-1 says on which side of the axis the
    triangle lies (+1 = outline corner counterclockwise of the axis).
    """

    kind: str
    tip: Cyclo10
    rot: int
    chirality: int

    @property
    def vertices(self) -> tuple[Cyclo10, Cyclo10, Cyclo10]:
        """(apex, outline corner, axis corner).

        The apex is the tip.  The outline corner is the parent tile's side
        corner.  The axis corner is the far corner (half-kite) or the
        reflex corner (half-dart); the edge from it back to the apex is
        the symmetry axis of the parent tile.
        """
        b = self.tip + PHI_ZETA[(self.rot + self.chirality) % 10]
        if self.kind == HALF_KITE:
            c = self.tip + PHI_ZETA[self.rot]
        else:
            c = self.tip + ZETA_POW[self.rot]
        return (self.tip, b, c)

    @property
    def slots(self) -> tuple[str, str, str]:
        """Whole-tile corner slot names for the three vertices."""
        if self.kind == HALF_KITE:
            return ("tip", "side", "far")
        return ("tip", "side", "reflex")

    def edges(self) -> tuple[tuple[str, Cyclo10, Cyclo10], ...]:
        """Labelled edges: (label, a, b) with label long/short/axis."""
        t, b, c = self.vertices
        return (("long", t, b), ("short", b, c), ("axis", c, t))

    def translated(self, d: Cyclo10) -> "HalfTile":
        return HalfTile(self.kind, self.tip + d, self.rot, self.chirality)

    def rotated(self, k: int) -> "HalfTile":
        return HalfTile(self.kind, self.tip.rotated(k),
                        (self.rot + k) % 10, self.chirality)

    def reflected(self) -> "HalfTile":
        """Mirror image across the real axis."""
        return HalfTile(self.kind, self.tip.conj(),
                        (-self.rot) % 10, -self.chirality)

    def area2(self) -> tuple[int, int]:
        """Twice the area, exact, in units of sin(pi/5)."""
        t, b, c = self.vertices
        a = cross_area2(b - t, c - t)
        return a if quad_sign(*a) > 0 else (-a[0], -a[1])


@dataclass(frozen=True)
class Tile:
    """A whole kite or dart: kind, tip anchor, rotation index 0..9."""

    kind: str
    anchor: Cyclo10
    rot: int

    def halves(self) -> tuple[HalfTile, HalfTile]:
        hk = HALF_KITE if self.kind == KITE else HALF_DART
        return (HalfTile(hk, self.anchor, self.rot, 1),
                HalfTile(hk, self.anchor, self.rot, -1))

    @property
    def outline(self) -> tuple[Cyclo10, Cyclo10, Cyclo10, Cyclo10]:
        """Corners in slot order tip, side1, far/reflex, side2."""
        t, r = self.anchor, self.rot
        faraway = PHI_ZETA[r] if self.kind == KITE else ZETA_POW[r]
        return (t, t + PHI_ZETA[(r + 1) % 10], t + faraway,
                t + PHI_ZETA[(r - 1) % 10])

    def corner(self, slot: str) -> Cyclo10:
        return self.outline[CORNER_SLOTS[self.kind].index(slot)]

    def edges(self) -> tuple[tuple[Cyclo10, Cyclo10], ...]:
        a, b, c, d = self.outline
        return ((a, b), (b, c), (c, d), (d, a))

    def translated(self, d: Cyclo10) -> "Tile":
        return Tile(self.kind, self.anchor + d, self.rot)

    def rotated(self, k: int) -> "Tile":
        return Tile(self.kind, self.anchor.rotated(k), (self.rot + k) % 10)

    def reflected(self) -> "Tile":
        return Tile(self.kind, self.anchor.conj(), (-self.rot) % 10)


def _tile_key(t: Tile) -> tuple:
    return (t.anchor.coeffs, t.kind, t.rot)


def _half_key(h: HalfTile) -> tuple:
    return (h.tip.coeffs, h.kind, h.rot, h.chirality)


@dataclass(frozen=True)
class Patch:
    """A patch of whole tiles plus any unpaired boundary half-tiles.

    Tile ids are positions in the tiles tuple; construction through
    make_patch sorts tiles into a canonical order so ids are reproducible.
    scale_exp records how many times coordinates have been scaled by phi.
    """

    tiles: tuple[Tile, ...]
    halves: tuple[HalfTile, ...]
    scale_exp: int

    def __len__(self) -> int:
        return len(self.tiles)

    def all_halves(self) -> Iterator[tuple[int | None, HalfTile]]:
        """Yield (tile id or None for loose halves, half-tile)."""
        for i, t in enumerate(self.tiles):
            for h in t.halves():
                yield (i, h)
        for h in self.halves:
            yield (None, h)

    def area2(self) -> tuple[int, int]:
        """Twice the patch area at storage scale, exact (a + b*phi)."""
        a = b = 0
        for _, h in self.all_halves():
            da, db = h.area2()
            a, b = a + da, b + db
        return (a, b)


def make_patch(tiles: Iterable[Tile], halves: Iterable[HalfTile] = (),
               scale_exp: int = 0) -> Patch:
    return Patch(tuple(sorted(tiles, key=_tile_key)),
                 tuple(sorted(halves, key=_half_key)), scale_exp)


SEED_NAMES = ("kite", "dart", "sun", "star")


def seed_patch(name: str) -> Patch:
    """One of the four canonical seeds, anchored at the origin."""
    if name == "kite":
        tiles = [Tile(KITE, ZERO, 0)]
    elif name == "dart":
        tiles = [Tile(DART, ZERO, 0)]
    elif name == "sun":
        tiles = [Tile(KITE, ZERO, r) for r in range(0, 10, 2)]
    elif name == "star":
        tiles = [Tile(DART, ZERO, r) for r in range(0, 10, 2)]
    else:
        raise ValueError(f"unknown seed {name!r}")
    return make_patch(tiles)


def deflate_half(h: HalfTile) -> list[HalfTile]:
    """Substitute one half-tile; children live at coordinates scaled by phi.

    A half-kite splits into two half-kites and a half-dart, a half-dart
    into a half-kite and a half-dart, so whole-tile counts follow
    (kites, darts) -> (2*kites + darts, kites + darts).
    """
    t2 = h.tip.times_phi()
    m = h.chirality
    b2 = t2 + PHI2_ZETA[(h.rot + m) % 10]
    if h.kind == HALF_KITE:
        return [HalfTile(HALF_DART, t2, (h.rot + m) % 10, -m),
                HalfTile(HALF_KITE, b2, (h.rot + 7 * m) % 10, m),
                HalfTile(HALF_KITE, b2, (h.rot + 7 * m) % 10, -m)]
    return [HalfTile(HALF_KITE, t2, h.rot, m),
            HalfTile(HALF_DART, b2, (h.rot + 6 * m) % 10, m)]


def merge_halves(halves: Iterable[HalfTile]) -> tuple[list[Tile], list[HalfTile]]:
    """Pair mirror half-tiles into whole tiles; return (tiles, leftovers)."""
    seen: dict[tuple, int] = {}
    for h in halves:
        key = (h.kind, h.tip, h.rot)
        seen[key] = seen.get(key, 0) | (1 if h.chirality > 0 else 2)
    tiles: list[Tile] = []
    loose: list[HalfTile] = []
    for (kind, tip, rot), mask in seen.items():
        whole = KITE if kind == HALF_KITE else DART
        if mask == 3:
            tiles.append(Tile(whole, tip, rot))
        else:
            loose.append(HalfTile(kind, tip, rot, 1 if mask == 1 else -1))
    return tiles, loose


def inflate(patch: Patch, steps: int = 1) -> Patch:
    """Apply the substitution steps times (inflation at constant tile size).

    Coordinates are multiplied by phi at each step and scale_exp is
    incremented, so physical positions are unchanged while each old tile
    is subdivided into new full-size tiles.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    cur = patch
    for _ in range(steps):
        children = [c for _, h in cur.all_halves() for c in deflate_half(h)]
        tiles, loose = merge_halves(children)
        cur = make_patch(tiles, loose, cur.scale_exp + 1)
    return cur


# ---------------------------------------------------------------------------
# patch validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Violation:
    """One structural or matching-rule defect found in a patch.

    kind is "overlap", "partial_edge" or "matching_rule".  owners names the
    participants: "t<i>" for tile id i, "h<j>" for loose half j.
    """

    kind: str
    owners: tuple[str, ...]
    detail: str


# Float arithmetic is used only to reject clearly non-degenerate cases;
# whenever a float magnitude is below this margin the exact ring predicate
# decides.  Coordinates in any realistic patch stay far below the size at
# which doubles could err by this much.
_EPS = 1e-6


def _fcross(a: tuple[float, float], b: tuple[float, float],
            c: tuple[float, float]) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _strictly_on_segment(p: Cyclo10, a: Cyclo10, b: Cyclo10,
                         pf: tuple[float, float], af: tuple[float, float],
                         bf: tuple[float, float]) -> bool:
    if abs(_fcross(af, bf, pf)) > _EPS:
        return False
    u = b - a
    if cross_sign(u, p - a) != 0:
        return False
    return dot_sign(p - a, u) > 0 and dot_sign(p - b, a - b) > 0


def _properly_cross(a: Cyclo10, b: Cyclo10, c: Cyclo10, d: Cyclo10,
                    af, bf, cf, df) -> bool:
    d1, d2 = _fcross(af, bf, cf), _fcross(af, bf, df)
    d3, d4 = _fcross(cf, df, af), _fcross(cf, df, bf)
    if min(abs(d1), abs(d2), abs(d3), abs(d4)) > _EPS:
        return (d1 > 0) != (d2 > 0) and (d3 > 0) != (d4 > 0)
    u, v = b - a, d - c
    s1, s2 = cross_sign(u, c - a), cross_sign(u, d - a)
    s3, s4 = cross_sign(v, a - c), cross_sign(v, b - c)
    return s1 * s2 < 0 and s3 * s4 < 0


def _strictly_inside(p: Cyclo10, tri: tuple[Cyclo10, ...], pf, trif) -> bool:
    s = _fcross(trif[0], trif[1], trif[2])
    orient = 1 if s > 0 else -1
    exact_needed = False
    for i in range(3):
        f = _fcross(trif[i], trif[(i + 1) % 3], pf)
        if abs(f) <= _EPS:
            exact_needed = True
        elif (f > 0) != (orient > 0):
            return False
    if not exact_needed:
        return True
    a, b, c = tri
    so = cross_sign(b - a, c - a)
    return all(cross_sign(v - u, p - u) == so
               for u, v in ((a, b), (b, c), (c, a)))


def validate_patch(patch: Patch) -> list[Violation]:
    """Check that a patch is a legal fragment of a P2 tiling.

    Detects, with exact arithmetic: duplicated tile pieces, overlapping
    tiles (edge crossings, vertices buried inside tiles, outline edges
    lying along the open axis side of a lone half-tile), partial edge
    contact (a vertex strictly inside another tile's edge), and
    matching-rule breaches (vertex colors disagreeing across a fully
    shared edge).  Returns a sorted list of violations; a valid patch
    yields an empty list.
    """
    owners: list[str] = []
    halves: list[HalfTile] = []
    for i, t in enumerate(patch.tiles):
        for h in t.halves():
            owners.append(f"t{i}")
            halves.append(h)
    for j, h in enumerate(patch.halves):
        owners.append(f"h{j}")
        halves.append(h)

    bad: set[Violation] = set()

    # duplicated pieces
    seen: dict[tuple, str] = {}
    for own, h in zip(owners, halves):
        k = _half_key(h)
        if k in seen:
            bad.add(Violation("overlap", tuple(sorted({seen[k], own})),
                              "duplicate piece"))
        else:
            seen[k] = own

    whole_kind = {HALF_KITE: KITE, HALF_DART: DART}

    # exact point registry and float shadows
    fpt: dict[tuple, tuple[float, float]] = {}
    ring_pt: dict[tuple, Cyclo10] = {}

    def register(p: Cyclo10) -> tuple:
        k = p.coeffs
        if k not in fpt:
            z = complex(p)
            fpt[k] = (z.real, z.imag)
            ring_pt[k] = p
        return k

    # corners and edges
    corner_owners: dict[tuple, set[str]] = {}
    edge_map: dict[frozenset, list[tuple[str, str, dict]]] = {}
    tri_list: list[tuple[str, tuple[Cyclo10, ...], tuple]] = []
    for own, h in zip(owners, halves):
        verts = h.vertices
        keys = [register(v) for v in verts]
        kind = whole_kind[h.kind]
        for k, slot in zip(keys, h.slots):
            corner_owners.setdefault(k, set()).add(own)
        slot_of = dict(zip(keys, ((kind, s) for s in h.slots)))
        t, b, c = keys
        for label, ka, kb in (("long", t, b), ("short", b, c), ("axis", c, t)):
            edge_map.setdefault(frozenset((ka, kb)), []).append(
                (own, label, {ka: slot_of[ka], kb: slot_of[kb]}))
        tri_list.append((own, verts, (keys[0], keys[1], keys[2])))

    # structural / matching analysis of shared edges
    unique_edges: list[tuple[tuple, tuple, tuple[str, ...]]] = []
    for ekey, entries in edge_map.items():
        ka, kb = tuple(ekey)
        eowners = tuple(sorted({e[0] for e in entries}))
        unique_edges.append((ka, kb, eowners))
        if len(entries) > 2:
            bad.add(Violation("overlap", eowners, "edge shared more than twice"))
            continue
        if len(entries) != 2:
            continue
        (o1, l1, s1), (o2, l2, s2) = entries
        if o1 == o2:
            continue  # the two halves of one tile along its axis
        if l1 == "axis" and l2 == "axis":
            continue  # two loose halves forming a virtual whole tile
        if "axis" in (l1, l2):
            bad.add(Violation("overlap", tuple(sorted({o1, o2})),
                              "outline edge along the open side of a half-tile"))
            continue
        for k in (ka, kb):
            if VERTEX_COLOR[s1[k]] != VERTEX_COLOR[s2[k]]:
                bad.add(Violation("matching_rule", tuple(sorted({o1, o2})),
                                  f"colors disagree at corner {k}"))
                break

    # spatial hash (cell size 1.0; max edge length is phi)
    def cells_of(points: Iterable[tuple[float, float]]) -> list[tuple[int, int]]:
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        x0, x1 = math.floor(min(xs)), math.floor(max(xs))
        y0, y1 = math.floor(min(ys)), math.floor(max(ys))
        return [(cx, cy) for cx in range(x0, x1 + 1)
                for cy in range(y0, y1 + 1)]

    edge_cells: dict[tuple[int, int], list[int]] = {}
    for idx, (ka, kb, _) in enumerate(unique_edges):
        for cell in cells_of((fpt[ka], fpt[kb])):
            edge_cells.setdefault(cell, []).append(idx)

    tri_cells: dict[tuple[int, int], list[int]] = {}
    for idx, (_, _, keys) in enumerate(tri_list):
        for cell in cells_of([fpt[k] for k in keys]):
            tri_cells.setdefault(cell, []).append(idx)

    # vertices strictly inside edges (T junctions) or inside triangles
    for pkey, powners in corner_owners.items():
        px, py = fpt[pkey]
        cx, cy = math.floor(px), math.floor(py)
        p = ring_pt[pkey]
        cand_edges: set[int] = set()
        cand_tris: set[int] = set()
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                cand_edges.update(edge_cells.get((cx + dx, cy + dy), ()))
                cand_tris.update(tri_cells.get((cx + dx, cy + dy), ()))
        for idx in cand_edges:
            ka, kb, eowners = unique_edges[idx]
            if pkey == ka or pkey == kb:
                continue
            if _strictly_on_segment(p, ring_pt[ka], ring_pt[kb],
                                    fpt[pkey], fpt[ka], fpt[kb]):
                bad.add(Violation("partial_edge",
                                  tuple(sorted(powners | set(eowners))),
                                  "vertex inside another tile's edge"))
        for idx in cand_tris:
            town, verts, keys = tri_list[idx]
            if pkey in keys:
                continue
            if _strictly_inside(p, verts, fpt[pkey],
                                tuple(fpt[k] for k in keys)):
                bad.add(Violation("overlap",
                                  tuple(sorted(powners | {town})),
                                  "vertex inside another tile"))

    # properly crossing edges
    pair_seen: set[tuple[int, int]] = set()
    for cell, idxs in edge_cells.items():
        for i in range(len(idxs)):
            for j in range(i + 1, len(idxs)):
                e1, e2 = idxs[i], idxs[j]
                if e1 > e2:
                    e1, e2 = e2, e1
                if (e1, e2) in pair_seen:
                    continue
                pair_seen.add((e1, e2))
                ka, kb, own1 = unique_edges[e1]
                kc, kd, own2 = unique_edges[e2]
                if {ka, kb} & {kc, kd}:
                    continue
                if _properly_cross(ring_pt[ka], ring_pt[kb],
                                   ring_pt[kc], ring_pt[kd],
                                   fpt[ka], fpt[kb], fpt[kc], fpt[kd]):
                    bad.add(Violation("overlap",
                                      tuple(sorted(set(own1) | set(own2))),
                                      "edges cross"))

    return sorted(bad)
