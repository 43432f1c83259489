"""Caterpillar structure of fully leafed induced subtrees.

A caterpillar is a tree whose derived tree (internals only) is a path.
The maximal fully leafed trees whose internals all have degree 3 turn
out to have 8 internal tiles and 10 leaves; they come in six shapes up
to isometry and choice of leaves, and every larger fully leafed tree is
built from them by grafting at shared leaves.

Each prime hugs exactly one star of the tiling (its home star) and
determines two outgoing edges of the star overlay graph; grafted
neighbours sit at the far ends of those edges.  Chains of grafted primes
therefore trace paths in the overlay, and the angle a prime subtends
between its two edges, measured on the side the caterpillar occupies, is
always 4, 6 or 8 in units of pi/5.  The class table, ray table and the
local grammar of angle words below were all established by exhaustive
enumeration over generated patches; the tests re-derive them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .ring import Cyclo10, cross_sign, dot_sign
from .geometry import Patch, Tile
from .dualgraph import P2Graph
from .stargraph import StarGraph, StarVertex
from .flis import InducedSubtree, induced_subtree, leaf_count, \
    leaf_function_formula

PRIME_ORDER = 18        # 8 internal tiles of degree 3 plus 10 leaves
PRIME_INTERNALS = 8


def derive(g: P2Graph, t: InducedSubtree) -> InducedSubtree:
    """The tree on the internal (non-leaf) tiles of t; may be empty."""
    return induced_subtree(g, t.internals)


def is_caterpillar(g: P2Graph, t: InducedSubtree) -> bool:
    """True when the derived tree is a path (or empty)."""
    return all(d <= 2 for d in derive(g, t).degrees)


def internal_chain(g: P2Graph, t: InducedSubtree) -> tuple[int, ...]:
    """Internal tiles in path order; starts at the smaller endpoint id.

    Raises ValueError when the derived tree is not a path.
    """
    d = derive(g, t)
    if d.order == 0:
        return ()
    if any(deg > 2 for deg in d.degrees):
        raise ValueError("derived tree is not a path")
    if d.order == 1:
        return d.tiles
    idset = set(d.tiles)
    ends = [v for v, deg in zip(d.tiles, d.degrees) if deg == 1]
    cur, prev = min(ends), -1
    out = [cur]
    while len(out) < d.order:
        nxt = [u for u in g.neighbors(cur) if u in idset and u != prev]
        prev, cur = cur, nxt[0]
        out.append(cur)
    return tuple(out)


# ---------------------------------------------------------------------------
# canonical shape signatures
# ---------------------------------------------------------------------------

def _chain_signature(tiles: Sequence[Tile]) -> tuple:
    """Raw signature of a tile sequence: first kind, then each step's
    (kind, rotation difference, anchor delta in the previous tile's
    frame).  Invariant under rotation and translation."""
    sig: list = [tiles[0].kind]
    for a, b in zip(tiles, tiles[1:]):
        delta = (b.anchor - a.anchor).rotated((-a.rot) % 10)
        sig.append((b.kind, (b.rot - a.rot) % 10, delta.coeffs))
    return tuple(sig)


def _variants(tiles: Sequence[Tile]):
    """The four direction/mirror readings of a tile sequence, each with
    the data needed to map plane vectors into that reading's frame."""
    out = []
    for rev in (False, True):
        seq = list(tiles[::-1] if rev else tiles)
        for refl in (False, True):
            s2 = [t.reflected() for t in seq] if refl else seq
            out.append((_chain_signature(s2), rev, refl, s2[0].rot))
    return out


def chain_signature(p: Patch, chain: Sequence[int]) -> tuple:
    """Canonical signature of an internal chain: the minimum of the raw
    signature over both directions and both mirror images."""
    tiles = [p.tiles[i] for i in chain]
    return min(v[0] for v in _variants(tiles))


def tiles_from_signature(sig: tuple) -> list[Tile]:
    """Materialize the canonical representative tile sequence encoded by
    a signature (first tile at the origin with rotation 0)."""
    out = [Tile(sig[0], Cyclo10(0), 0)]
    for kind, drot, delta in sig[1:]:
        prev = out[-1]
        anchor = prev.anchor + Cyclo10(*delta).rotated(prev.rot)
        out.append(Tile(kind, anchor, (prev.rot + drot) % 10))
    return out


# ---------------------------------------------------------------------------
# the six prime classes
#
# Exhaustive enumeration of the order-18 optima over generated patches
# produces exactly these six canonical internal-chain signatures.  Class
# numbering: the unique angle-8 class is 4; the class whose bidirectional
# extension by grafting stalls (never more than 2 primes of cover on both
# sides, in any patch) is 1; the remaining pairs {3, 6} (angle 4) and
# {2, 5} (angle 6) are ordered by canonical signature.
# ---------------------------------------------------------------------------

_SIG_PC1 = ('D', ('K', 5, (1, 0, 0, -1)), ('K', 2, (0, 0, 0, 0)),
            ('K', 6, (2, 0, 2, -1)), ('K', 2, (0, 0, 0, 0)),
            ('K', 6, (2, 0, 2, -1)), ('K', 2, (0, 0, 0, 0)),
            ('D', 5, (1, 0, 1, 0)))
_SIG_PC3 = ('D', ('K', 5, (1, 0, 0, -1)), ('K', 2, (0, 0, 0, 0)),
            ('K', 6, (2, 0, 2, -1)), ('K', 2, (0, 0, 0, 0)),
            ('K', 6, (2, 0, 2, -1)), ('K', 2, (0, 0, 0, 0)),
            ('K', 2, (0, 0, 0, 0)))
_SIG_PC2 = ('D', ('K', 5, (1, 0, 0, -1)), ('K', 2, (0, 0, 0, 0)),
            ('K', 6, (2, 0, 2, -1)), ('K', 2, (0, 0, 0, 0)),
            ('K', 6, (2, 0, 2, -1)), ('K', 2, (0, 0, 0, 0)),
            ('K', 6, (2, 0, 2, -1)))
_SIG_PC6 = ('K', ('K', 2, (0, 0, 0, 0)), ('K', 2, (0, 0, 0, 0)),
            ('K', 6, (2, 0, 2, -1)), ('K', 2, (0, 0, 0, 0)),
            ('K', 6, (2, 0, 2, -1)), ('K', 2, (0, 0, 0, 0)),
            ('K', 2, (0, 0, 0, 0)))
_SIG_PC5 = ('K', ('K', 2, (0, 0, 0, 0)), ('K', 2, (0, 0, 0, 0)),
            ('K', 6, (2, 0, 2, -1)), ('K', 2, (0, 0, 0, 0)),
            ('K', 6, (2, 0, 2, -1)), ('K', 2, (0, 0, 0, 0)),
            ('K', 6, (2, 0, 2, -1)))
_SIG_PC4 = ('K', ('K', 4, (2, 0, 1, -2)), ('K', 8, (0, 0, 0, 0)),
            ('K', 4, (2, 0, 1, -2)), ('K', 8, (0, 0, 0, 0)),
            ('K', 4, (2, 0, 1, -2)), ('K', 8, (0, 0, 0, 0)),
            ('K', 4, (2, 0, 1, -2)))

CLASS_SIGNATURES: dict[tuple, int] = {
    _SIG_PC1: 1, _SIG_PC2: 2, _SIG_PC3: 3,
    _SIG_PC4: 4, _SIG_PC5: 5, _SIG_PC6: 6,
}

#: class id -> angle in pi/5 units between the two overlay edges,
#: measured on the caterpillar's side
ANGLE_OF_CLASS = {1: 4, 2: 6, 3: 4, 4: 8, 5: 6, 6: 4}

#: class id -> the two overlay-edge vectors (home star to flanking star)
#: in the frame of the canonical representative; grafted neighbours sit
#: exactly at these offsets from the home star
CLASS_RAYS: dict[int, tuple[tuple, tuple]] = {
    1: ((0, -3, -2, -3), (3, 2, 3, 0)),
    3: ((0, -3, -2, -3), (3, 2, 3, 0)),
    2: ((-5, 0, -3, 3), (3, 2, 3, 0)),
    6: ((-5, 2, -2, 5), (3, -3, 0, -5)),
    5: ((0, 3, 2, 3), (3, -3, 0, -5)),
    4: ((-5, 2, -2, 5), (-3, -2, -3, 0)),
}


@dataclass(frozen=True)
class PrimeCaterpillar:
    """One prime building block located in a patch.

    home_star is the center of the unique star its internal chain
    touches; flanking_stars are the far endpoints of its two overlay
    edges, where grafted neighbours attach.  angle_class is the angle
    between the two edges on the caterpillar side, in units of pi/5.
    """

    tree: InducedSubtree
    class_id: int
    home_star: Cyclo10
    flanking_stars: tuple[Cyclo10, Cyclo10]
    angle_class: int


def _check_prime_shape(g: P2Graph, t: InducedSubtree) -> tuple[int, ...]:
    """Validate the prime precondition and return the internal chain.

    Accepts the full 18-tile prime (all internals of degree 3) and the
    17-tile maximum-leaf tree one leaf short of it (one internal of
    degree 2); both have the same 8-tile internal chain.
    """
    internals = t.internals
    if len(internals) != PRIME_INTERNALS:
        raise ValueError(f"expected {PRIME_INTERNALS} internal tiles, "
                         f"got {len(internals)}")
    if t.order not in (PRIME_ORDER - 1, PRIME_ORDER):
        raise ValueError(f"expected order {PRIME_ORDER - 1} or "
                         f"{PRIME_ORDER}, got {t.order}")
    if leaf_count(t) != leaf_function_formula(t.order):
        raise ValueError("tree is not fully leafed for its order")
    return internal_chain(g, t)


def classify_prime(t: InducedSubtree, p: Patch, g: P2Graph) -> int:
    """Class id 1..6 of a prime caterpillar (or of the order-17 tree one
    leaf short of one), by canonical internal-chain signature."""
    chain = _check_prime_shape(g, t)
    sig = chain_signature(p, chain)
    try:
        return CLASS_SIGNATURES[sig]
    except KeyError:
        raise ValueError("internal chain does not match any of the six "
                         "prime shapes") from None


def home_star_of(chain: Sequence[int], g: P2Graph,
                 stars: Sequence[StarVertex]) -> int:
    """Index of the unique star whose darts belong to or share a dual
    edge with the internal chain; error if there is not exactly one."""
    star_of_tile = {}
    for si, s in enumerate(stars):
        for ti in s.star_tiles:
            star_of_tile[ti] = si
    hit = set()
    for i in chain:
        if i in star_of_tile:
            hit.add(star_of_tile[i])
        for u in g.neighbors(i):
            if u in star_of_tile:
                hit.add(star_of_tile[u])
    if len(hit) != 1:
        raise ValueError(f"internal chain touches {len(hit)} complete "
                         f"stars, expected exactly 1")
    return hit.pop()


def _rays_in_plane(tiles: Sequence[Tile], class_id: int
                   ) -> tuple[Cyclo10, Cyclo10]:
    """Map the class's canonical-frame ray pair back through the variant
    that realizes the canonical signature of this concrete chain."""
    vs = _variants(tiles)
    m = min(v[0] for v in vs)
    sig, rev, refl, _ = next(v for v in vs if v[0] == m)
    seq = list(tiles[::-1] if rev else tiles)
    r0 = seq[0].rot
    out = []
    for coeffs in CLASS_RAYS[class_id]:
        ray = Cyclo10(*coeffs)
        if refl:
            ray = ray.conj()
        out.append(ray.rotated(r0))
    out.sort(key=lambda c: c.coeffs)
    return (out[0], out[1])


def locate_prime(t: InducedSubtree, p: Patch, g: P2Graph,
                 sg: StarGraph) -> PrimeCaterpillar:
    """Classify t and anchor it in the star overlay: home star, the two
    flanking star centers, and the angle class."""
    chain = _check_prime_shape(g, t)
    cid = classify_prime(t, p, g)
    home_idx = home_star_of(chain, g, sg.vertices)
    home = sg.vertices[home_idx].center
    r1, r2 = _rays_in_plane([p.tiles[i] for i in chain], cid)
    return PrimeCaterpillar(tree=t, class_id=cid, home_star=home,
                            flanking_stars=(home + r1, home + r2),
                            angle_class=ANGLE_OF_CLASS[cid])


# ---------------------------------------------------------------------------
# exact angles and sides
# ---------------------------------------------------------------------------

def angle_tenths(u: Cyclo10, v: Cyclo10) -> int:
    """Counterclockwise angle from u to v in units of pi/5 (0..9);
    requires both vectors to point in lattice directions so the angle is
    an exact multiple."""
    for k in range(10):
        w = u.rotated(k)
        if cross_sign(w, v) == 0 and dot_sign(w, v) > 0:
            return k
    raise ValueError("angle between vectors is not a multiple of pi/5")


def _in_ccw_sector(a: Cyclo10, b: Cyclo10, z: Cyclo10) -> bool:
    """Is direction z strictly inside the sector swept counterclockwise
    from a to b?  All vectors nonzero; boundary rays count as outside."""
    cab = cross_sign(a, b)
    if cab > 0:
        return cross_sign(a, z) > 0 and cross_sign(z, b) > 0
    if cab < 0:
        on_a = cross_sign(a, z) == 0 and dot_sign(a, z) > 0
        on_b = cross_sign(b, z) == 0 and dot_sign(b, z) > 0
        inside_comp = cross_sign(b, z) > 0 and cross_sign(z, a) > 0
        return not (inside_comp or on_a or on_b)
    if dot_sign(a, b) < 0:        # straight line, sector is a half plane
        return cross_sign(a, z) > 0
    raise ValueError("degenerate sector: rays coincide")


def _centroid4(p: Patch, i: int) -> Cyclo10:
    o = p.tiles[i].outline
    return o[0] + o[1] + o[2] + o[3]


def second_derived_tiles(g: P2Graph, t: InducedSubtree) -> tuple[int, ...]:
    """Internal tiles of the derived tree (the chain minus its ends)."""
    d = derive(g, t)
    return d.internals


def _body_direction(pc: PrimeCaterpillar, p: Patch,
                    g: P2Graph) -> Cyclo10:
    """Mean direction from the home star to the caterpillar body: the
    sum of centroid offsets of the twice-derived tiles.  The chain wraps
    most of the way around its star, so single tiles sit on both sides
    of any ray; their sum always points into the body's wedge."""
    a4 = pc.home_star * 4
    z = Cyclo10(0)
    for i in second_derived_tiles(g, pc.tree):
        z = z + (_centroid4(p, i) - a4)
    return z


def prime_side(pc: PrimeCaterpillar, prev_star: Cyclo10, next_star: Cyclo10,
               p: Patch, g: P2Graph) -> str:
    """Side L or R of the directed overlay path prev -> home -> next on
    which the caterpillar body lies; error if the body direction falls
    on the path itself."""
    u = (prev_star - pc.home_star) * 4
    v = (next_star - pc.home_star) * 4
    z = _body_direction(pc, p, g)
    if _in_ccw_sector(v, u, z):
        return "L"
    if _in_ccw_sector(u, v, z):
        return "R"
    raise ValueError("caterpillar body direction lies on the overlay "
                     "path")


def angle_of(pc: PrimeCaterpillar, sg: StarGraph, p: Patch,
             g: P2Graph) -> int:
    """Exact angle between the prime's two overlay edges, measured on
    the caterpillar's side, in units of pi/5.

    Requires both flanking stars to be vertices of sg (with the edges to
    the home star present); recomputed from geometry, not the class
    table, so the table is independently checkable.
    """
    centers = {v.center: i for i, v in enumerate(sg.vertices)}
    if pc.home_star not in centers:
        raise ValueError("home star not found in star graph")
    hi = centers[pc.home_star]
    for f in pc.flanking_stars:
        if f not in centers:
            raise ValueError("flanking star not found in star graph")
        fi = centers[f]
        e = (min(hi, fi), max(hi, fi))
        if e not in sg.edges:
            raise ValueError("flanking edge not present in star graph")
    u = pc.flanking_stars[0] - pc.home_star
    v = pc.flanking_stars[1] - pc.home_star
    k = angle_tenths(u, v)
    z = _body_direction(pc, p, g)
    if _in_ccw_sector(u, v, z):
        return k
    if _in_ccw_sector(v, u, z):
        return 10 - k
    raise ValueError("caterpillar body direction lies on a flanking "
                     "edge")


# ---------------------------------------------------------------------------
# grafting
# ---------------------------------------------------------------------------

def graft(g: P2Graph, i1: InducedSubtree, i2: InducedSubtree,
          t: int) -> InducedSubtree:
    """Join two fully leafed trees at a shared leaf tile t.

    The union must again be an induced subtree and fully leafed for its
    order (leaf count equal to the leaf function); anything else is an
    error, matching the definition of grafting.
    """
    s1, s2 = set(i1.tiles), set(i2.tiles)
    inter = s1 & s2
    if inter != {t}:
        raise ValueError(f"trees must intersect exactly in {{{t}}}, "
                         f"intersection has {len(inter)} tiles")
    if t not in i1.leaves or t not in i2.leaves:
        raise ValueError(f"tile {t} must be a leaf of both trees")
    try:
        union = induced_subtree(g, s1 | s2)
    except ValueError as e:
        raise ValueError(f"union is not an induced subtree: {e}") from None
    if leaf_count(union) != leaf_function_formula(union.order):
        raise ValueError(
            f"union of order {union.order} has {leaf_count(union)} leaves, "
            f"not fully leafed "
            f"({leaf_function_formula(union.order)} required)")
    return union


def graft_configuration(p: Patch, g: P2Graph, union: InducedSubtree,
                        t: int, halfwindow: int = 2) -> tuple:
    """Canonical signature of the junction: the derived-path window of
    +-halfwindow tiles around the shared tile t.  Over all two-prime
    graftings in a patch this takes exactly two values."""
    chain = internal_chain(g, union)
    pos = chain.index(t)
    lo = max(0, pos - halfwindow)
    window = [p.tiles[i] for i in chain[lo:pos + halfwindow + 1]]
    return min(v[0] for v in _variants(window))


# ---------------------------------------------------------------------------
# chains of primes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CaterpillarChain:
    """A fully leafed caterpillar decomposed into grafted primes.

    star_chain holds the overlay path: the outer flank of the first
    prime, each prime's home star, and the outer flank of the last
    prime.  partial is a leftover sub-prime segment at one end (tile
    ids), appendix a non-caterpillar attachment (tile ids); both are
    empty tuples when absent.
    """

    tree: InducedSubtree
    primes: tuple[PrimeCaterpillar, ...]
    graft_tiles: tuple[int, ...]
    star_chain: tuple[Cyclo10, ...]
    sides: tuple[str, ...]
    partial: tuple[int, ...] = ()
    appendix: tuple[int, ...] = ()

    @property
    def order(self) -> int:
        return self.tree.order

    def angle_word(self) -> str:
        return "".join(str(pc.angle_class) for pc in self.primes)


def _segment_tree(g: P2Graph, t: InducedSubtree, path: Sequence[int]
                  ) -> tuple[list[tuple[int, ...]], list[int], tuple[int, ...]]:
    """Split a derived path into 8-tile prime runs separated by single
    junction tiles (internals of degree 2 in t), with at most one
    shorter partial run at one end.  Returns (runs, junctions, partial).
    """
    deg = {v: d for v, d in zip(t.tiles, t.degrees)}
    n = len(path)
    # alignments: optional partial run of derived length q at the left
    # (q=0 means none), then full runs of 8 separated by junctions
    for q in range(0, 9):
        for flip in (False, True):
            seq = list(path[::-1]) if flip else list(path)
            pos = 0
            partial: tuple[int, ...] = ()
            if q:
                partial = tuple(seq[:q])
                pos = q
                if pos >= n or deg[seq[pos]] != 2:
                    continue
                pos += 1          # junction after the partial
                junctions = [seq[q]]
            else:
                junctions = []
            runs = []
            ok = True
            while pos < n:
                run = seq[pos:pos + 8]
                if len(run) != 8:
                    ok = False
                    break
                runs.append(tuple(run))
                pos += 8
                if pos < n:
                    if deg[seq[pos]] != 2:
                        ok = False
                        break
                    junctions.append(seq[pos])
                    pos += 1
            if ok and runs:
                return runs, junctions, partial
    raise ValueError("derived path does not segment into prime runs")


def _peel_appendix(g: P2Graph, t: InducedSubtree
                   ) -> tuple[InducedSubtree, tuple[int, ...]]:
    """If the derived tree is not a path, remove the smallest hanging
    branch (an appendix with at most 2 internal tiles plus its leaves)
    so that the rest is a caterpillar chain."""
    d = derive(g, t)
    if all(deg <= 2 for deg in d.degrees):
        return t, ()
    idset = set(d.tiles)
    adj = {v: [u for u in g.neighbors(v) if u in idset] for v in d.tiles}
    branch_vertices = [v for v in d.tiles if len(adj[v]) >= 3]
    tset = set(t.tiles)
    best: tuple[int, ...] | None = None
    for b in branch_vertices:
        for start in adj[b]:
            # walk the branch hanging off b through start
            comp = {start}
            stack = [start]
            ok = True
            while stack:
                v = stack.pop()
                for u in adj[v]:
                    if u == b or u in comp:
                        continue
                    comp.add(u)
                    stack.append(u)
                    if len(comp) > 3:
                        ok = False
                        break
                if not ok:
                    break
            if not ok or len(comp) > 3:
                continue
            # appendix = branch internals plus their private leaves
            app = set(comp)
            for v in comp:
                for u in g.neighbors(v):
                    if u in tset and u not in idset:
                        app.add(u)
            rest = tset - app
            try:
                rt = induced_subtree(g, rest)
            except ValueError:
                continue
            if not all(deg <= 2 for deg in derive(g, rt).degrees):
                continue
            if best is None or len(app) < len(best):
                best = tuple(sorted(app))
    if best is None:
        raise ValueError("no removable appendix makes the tree a "
                         "caterpillar")
    rest = tuple(sorted(tset - set(best)))
    return induced_subtree(g, rest), best


def decompose(t: InducedSubtree, p: Patch, g: P2Graph,
              sg: StarGraph) -> CaterpillarChain:
    """Decompose a fully leafed tree into grafted primes, an optional
    partial prime at one end, and an optional small appendix.

    The three possible outcomes mirror the structure theorem: a (sub)
    prime caterpillar alone, a chain of grafted primes with at most one
    partial, or such a chain with a grafted appendix of at most 2
    internal tiles and 4 leaves.
    """
    if leaf_count(t) != leaf_function_formula(t.order):
        raise ValueError("tree is not fully leafed for its order")
    core, appendix = _peel_appendix(g, t)
    path = internal_chain(g, core)
    runs, junctions, partial = _segment_tree(g, core, path)

    # grow each 8-run back to a located prime: the run plus every leaf
    # of t adjacent to it, which reconstitutes an order 17/18 prime
    coreset = set(core.tiles)
    pathset = set(path)
    juncset = set(junctions)
    primes = []
    for run in runs:
        rset = set(run)
        ext = set(run)
        for v in run:
            for u in g.neighbors(v):
                if u not in coreset or u in rset:
                    continue
                # private leaves, plus shared junction leaves
                if u not in pathset or u in juncset:
                    ext.add(u)
        sub = induced_subtree(g, ext)
        primes.append(locate_prime(sub, p, g, sg))

    # order primes along the chain and build the overlay path
    primes, junctions = _order_chain(primes, junctions, g)
    star_chain, sides = _resolve_star_chain(primes, p, g)
    return CaterpillarChain(tree=t, primes=tuple(primes),
                            graft_tiles=tuple(junctions),
                            star_chain=star_chain, sides=sides,
                            partial=partial, appendix=appendix)


def _order_chain(primes: list[PrimeCaterpillar], junctions: list[int],
                 g: P2Graph):
    """Primes come out of segmentation already in path order; normalize
    so the first home star is lexicographically smallest."""
    if len(primes) >= 2:
        if primes[0].home_star.coeffs > primes[-1].home_star.coeffs:
            primes = primes[::-1]
            junctions = junctions[::-1]
    return primes, junctions


def _resolve_star_chain(primes: Sequence[PrimeCaterpillar], p: Patch,
                        g: P2Graph) -> tuple[tuple[Cyclo10, ...], tuple[str, ...]]:
    """Overlay path through the homes, extended by each end prime's
    outer flanking edge, plus the per-prime sides.

    Consecutive homes must coincide with each other's flanking stars;
    the ends contribute their unused flank.
    """
    homes = [pc.home_star for pc in primes]
    m = len(primes)
    exts: list[Cyclo10] = []
    for idx, end_pc, nbr in ((0, primes[0], None if m == 1 else homes[1]),
                             (m - 1, primes[-1],
                              None if m == 1 else homes[-2])):
        fl = list(end_pc.flanking_stars)
        if nbr is not None:
            if nbr not in fl:
                raise ValueError("consecutive primes are not grafted "
                                 "along flanking edges")
            fl.remove(nbr)
            exts.append(fl[0])
        else:
            exts = fl
            break
    for i in range(1, m - 1):
        want = {homes[i - 1], homes[i + 1]}
        if set(primes[i].flanking_stars) != want:
            raise ValueError("interior prime's flanking stars do not "
                             "match its neighbours")
    if m == 1:
        star_chain = (exts[0], homes[0], exts[1])
    else:
        star_chain = (exts[0], *homes, exts[1])
    sides = tuple(
        prime_side(pc, star_chain[i], star_chain[i + 2], p, g)
        for i, pc in enumerate(primes))
    return star_chain, sides


def side_sequence(c: CaterpillarChain) -> tuple[str, ...]:
    """Per-prime sides along the chain; strict alternation is the
    expected behaviour for fully leafed chains."""
    return c.sides


def chain_from_primes(trees: Sequence[InducedSubtree], p: Patch,
                      g: P2Graph, sg: StarGraph) -> CaterpillarChain:
    """Graft a sequence of prime trees (in chain order) and decompose
    the result; a convenience used by search and tests."""
    acc = trees[0]
    for nxt in trees[1:]:
        shared = set(acc.tiles) & set(nxt.tiles)
        if len(shared) != 1:
            raise ValueError("consecutive primes must share exactly one "
                             "tile")
        acc = graft(g, acc, nxt, shared.pop())
    return decompose(acc, p, g, sg)


# ---------------------------------------------------------------------------
# words, forbidden patterns, sea caterpillars
# ---------------------------------------------------------------------------

def chain_word(c: CaterpillarChain, sg: StarGraph,
               alphabet: str = "angles") -> str:
    """The chain as a word: per-prime angles (over 468), or the vertex
    colors of the overlay path including both flanks (over RGB)."""
    if alphabet == "angles":
        return c.angle_word()
    if alphabet != "colors":
        raise ValueError(f"unknown alphabet {alphabet!r}")
    color_at = {v.center: v.color for v in sg.vertices}
    out = []
    for center in c.star_chain:
        col = color_at.get(center)
        if col is None:
            raise ValueError("star chain vertex missing from the colored "
                             "star graph")
        out.append(col)
    return "".join(out)


#: angle-word templates whose presence excludes a bi-infinite extension:
#: two consecutive sharp turns, and the capes 2 and 3 (an angle-4 or
#: angle-6 prime pinched between two angle-4 primes).  Cape 4 (8 between
#: two 4s) is the one pinched pattern that does extend.
CAPE_WORDS = {2: "444", 3: "464", 4: "484"}

#: the catalogue of primitive overlay-path blocks: every 3-letter factor
#: that occurs in fully leafed chains, named; observed home-star color
#: patterns are recorded for reference.  Factors of valid chains outside
#: this list are reported as residues.
SEA_CATALOGUE: tuple[tuple[str, str, tuple[str, ...]], ...] = (
    ("cape 4", "484", ("BRB", "GRG")),
    ("spur", "846", ("RGB", "RBG")),
    ("spur", "648", ("GBR", "BGR")),
    ("bend", "646", ("RBG", "GBG", "GBR", "RGB", "BGR", "BRG", "GRB")),
    ("bend", "686", ("BGB", "GRG", "BRG", "BRB", "GRB")),
    ("reach", "666", ("GRB", "BRG", "GRG")),
    ("reach", "466", ()), ("reach", "664", ()),
    ("reach", "668", ()), ("reach", "866", ()),
    ("turn", "468", ()), ("turn", "864", ()),
    ("turn", "486", ()), ("turn", "684", ()),
    ("turn", "848", ()),
)


@dataclass(frozen=True)
class SeaCaterpillar:
    """A catalogue block matched inside a chain's angle word."""

    name: str
    word: str
    start: int          # index of the first prime of the match

    @property
    def cape_id(self) -> int | None:
        for k, w in CAPE_WORDS.items():
            if self.word == w:
                return k
        return None


@dataclass(frozen=True)
class ChainViolation:
    kind: str
    detail: str
    start: int


def forbidden_patterns(c: CaterpillarChain) -> list[ChainViolation]:
    """All patterns that exclude extension to a bi-infinite caterpillar:
    consecutive 4,4 angles, any class-1 prime, and capes 2 and 3."""
    out: list[ChainViolation] = []
    w = c.angle_word()
    for i in range(len(w) - 1):
        if w[i] == w[i + 1] == "4":
            out.append(ChainViolation("angle-pair",
                                      "consecutive 4,4 angles", i))
    for i, pc in enumerate(c.primes):
        if pc.class_id == 1:
            out.append(ChainViolation("class-1", "prime of class 1", i))
    for cape in (2, 3):
        pat = CAPE_WORDS[cape]
        for i in range(len(w) - len(pat) + 1):
            if w[i:i + len(pat)] == pat:
                out.append(ChainViolation(
                    f"cape-{cape}", f"cape {cape} pattern {pat}", i))
    return out


def detect_sea_caterpillars(c: CaterpillarChain) -> list[SeaCaterpillar]:
    """Match the catalogue against the chain's angle word.

    Returns every catalogue block occurrence, in order of position.
    Residues (3-letter factors not in the catalogue) are reported as
    entries named "residue" so segmentation gaps are never silent.
    """
    w = c.angle_word()
    known = {word: name for name, word, _ in SEA_CATALOGUE}
    out: list[SeaCaterpillar] = []
    for i in range(len(w) - 2):
        f = w[i:i + 3]
        if f in known:
            out.append(SeaCaterpillar(known[f], f, i))
        else:
            out.append(SeaCaterpillar("residue", f, i))
    return out
