"""Line-based text formats for every artifact the package produces.

Six formats, all versioned v1: P2PATCH, P2GRAPH, FLIS, STARGRAPH, CHAIN
and EXTEND.  Writers emit a canonical byte sequence (LF line endings,
single spaces, trailing newline); parsers are strict enough that
write -> read -> write reproduces the bytes exactly.

Coordinates are the four integer components of a ring element; nothing
is ever rounded.  Boundary half-tiles of a patch are not serialized:
the format describes whole tiles only.
"""
from __future__ import annotations

from dataclasses import dataclass

from .ring import Cyclo10
from .geometry import Patch, Tile
from .dualgraph import P2Graph, interior_tiles
from .flis import InducedSubtree, LeafRecord, induced_subtree
from .stargraph import StarGraph, StarVertex


class FormatError(ValueError):
    """Malformed or unsupported input text."""


def _lines(text: str, magic: str) -> list[str]:
    lines = text.split("\n")
    if not lines or lines[0] != magic:
        raise FormatError(f"expected {magic!r} header")
    if lines[-1] != "":
        raise FormatError("missing trailing newline")
    return lines[1:-1]


# ---------------------------------------------------------------------------
# P2PATCH v1
# ---------------------------------------------------------------------------

def write_patch(p: Patch) -> str:
    out = ["P2PATCH v1", f"scale {p.scale_exp}"]
    for i, t in enumerate(p.tiles):
        c = t.anchor.coeffs
        out.append(f"tile {i} {t.kind} {t.rot} 0 "
                   f"{c[0]} {c[1]} {c[2]} {c[3]}")
    return "\n".join(out) + "\n"


def read_patch(text: str) -> Patch:
    lines = _lines(text, "P2PATCH v1")
    if not lines or not lines[0].startswith("scale "):
        raise FormatError("expected scale line")
    scale = int(lines[0][6:])
    tiles = []
    for ln in lines[1:]:
        f = ln.split(" ")
        if len(f) != 9 or f[0] != "tile":
            raise FormatError(f"bad tile line: {ln!r}")
        if int(f[1]) != len(tiles):
            raise FormatError("tile ids must be dense and ascending")
        if f[2] not in ("K", "D"):
            raise FormatError(f"unknown tile kind {f[2]!r}")
        rot = int(f[3])
        if not 0 <= rot <= 9:
            raise FormatError(f"rotation out of range: {rot}")
        if f[4] != "0":
            raise FormatError("mirrored tiles are not supported")
        anchor = Cyclo10(int(f[5]), int(f[6]), int(f[7]), int(f[8]))
        tiles.append(Tile(f[2], anchor, rot))
    return Patch(tiles=tuple(tiles), halves=(), scale_exp=scale)


# ---------------------------------------------------------------------------
# P2GRAPH v1
# ---------------------------------------------------------------------------

def write_graph(g: P2Graph) -> str:
    out = ["P2GRAPH v1"]
    for i, j in sorted(g.edges()):
        out.append(f"edge {i} {j}")
    for i in interior_tiles(g):
        out.append(f"interior {i}")
    return "\n".join(out) + "\n"


def read_graph(text: str) -> P2Graph:
    lines = _lines(text, "P2GRAPH v1")
    edges = []
    interior = []
    for ln in lines:
        f = ln.split(" ")
        if f[0] == "edge" and len(f) == 3:
            a, b = int(f[1]), int(f[2])
            if a >= b:
                raise FormatError("edge endpoints must satisfy id1 < id2")
            edges.append((a, b))
        elif f[0] == "interior" and len(f) == 2:
            interior.append(int(f[1]))
        else:
            raise FormatError(f"bad graph line: {ln!r}")
    if edges != sorted(edges):
        raise FormatError("edges must be in lexicographic order")
    n = max((b for _, b in edges), default=-1) + 1
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    g = P2Graph(tuple(tuple(sorted(x)) for x in adj))
    if list(interior_tiles(g)) != interior:
        raise FormatError("interior lines disagree with edge structure")
    return g


# ---------------------------------------------------------------------------
# FLIS v1
# ---------------------------------------------------------------------------

def write_flis(rec: LeafRecord) -> str:
    out = ["FLIS v1",
           f"n {rec.n} maxleaves {rec.max_leaves} "
           f"stable {1 if rec.stable else 0}"]
    for w in rec.witnesses:
        out.append("witness " + " ".join(str(i) for i in w.tiles))
    return "\n".join(out) + "\n"


def read_flis(text: str, g: P2Graph) -> LeafRecord:
    """Parse a search report; needs the graph to rebuild witnesses."""
    lines = _lines(text, "FLIS v1")
    f = lines[0].split(" ") if lines else []
    if len(f) != 6 or f[0] != "n" or f[2] != "maxleaves" or f[4] != "stable":
        raise FormatError("bad FLIS summary line")
    n, ml, stable = int(f[1]), int(f[3]), f[5]
    if stable not in ("0", "1"):
        raise FormatError("stable flag must be 0 or 1")
    wits = []
    for ln in lines[1:]:
        if not ln.startswith("witness "):
            raise FormatError(f"bad witness line: {ln!r}")
        ids = tuple(int(x) for x in ln[8:].split(" "))
        if ids != tuple(sorted(ids)):
            raise FormatError("witness ids must be sorted")
        w = induced_subtree(g, ids)
        if w.order != n:
            raise FormatError("witness order disagrees with n")
        wits.append(w)
    return LeafRecord(n=n, max_leaves=ml, witnesses=tuple(wits),
                      stable=stable == "1")


# ---------------------------------------------------------------------------
# STARGRAPH v1
# ---------------------------------------------------------------------------

def write_stargraph(sg: StarGraph) -> str:
    out = ["STARGRAPH v1"]
    for i, v in enumerate(sg.vertices):
        if v.color not in ("R", "G", "B"):
            raise FormatError(f"vertex {i} has no color; color the graph "
                              f"before writing")
        c = v.center.coeffs
        out.append(f"vertex {i} {c[0]} {c[1]} {c[2]} {c[3]} {v.color}")
    for i, j in sg.edges:
        out.append(f"edge {i} {j}")
    return "\n".join(out) + "\n"


def read_stargraph(text: str) -> StarGraph:
    """Parse the overlay: vertex centers, colors and edges.  The star
    tile ids and sun counts are not part of the format."""
    lines = _lines(text, "STARGRAPH v1")
    verts: list[StarVertex] = []
    edges = []
    for ln in lines:
        f = ln.split(" ")
        if f[0] == "vertex" and len(f) == 7:
            if int(f[1]) != len(verts):
                raise FormatError("vertex ids must be dense and ascending")
            if f[6] not in ("R", "G", "B"):
                raise FormatError(f"bad color {f[6]!r}")
            center = Cyclo10(int(f[2]), int(f[3]), int(f[4]), int(f[5]))
            verts.append(StarVertex(center, (), None, f[6]))
        elif f[0] == "edge" and len(f) == 3:
            a, b = int(f[1]), int(f[2])
            if not (0 <= a < b < len(verts)):
                raise FormatError(f"bad edge {a} {b}")
            edges.append((a, b))
        else:
            raise FormatError(f"bad star graph line: {ln!r}")
    return StarGraph(tuple(verts), tuple(edges), None)


# ---------------------------------------------------------------------------
# CHAIN v1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainReport:
    """Flat, serializable summary of a decomposed caterpillar chain."""

    primes: tuple[tuple[int, int, str], ...]    # (class, angle, side)
    colors: str
    angles: str
    violations: tuple[tuple[str, int], ...]     # (kind, start index)


def chain_report(c, sg: StarGraph) -> ChainReport:
    """Summarize a decomposed CaterpillarChain for serialization."""
    from .caterpillar import chain_word, forbidden_patterns
    primes = tuple((pc.class_id, pc.angle_class, side)
                   for pc, side in zip(c.primes, c.sides))
    return ChainReport(primes=primes,
                       colors=chain_word(c, sg, "colors"),
                       angles=c.angle_word(),
                       violations=tuple((v.kind, v.start)
                                        for v in forbidden_patterns(c)))


def write_chain(r: ChainReport) -> str:
    out = ["CHAIN v1"]
    for k, (cid, ang, side) in enumerate(r.primes):
        out.append(f"prime {k} class {cid} angle {ang} side {side}")
    out.append(f"word colors {r.colors}")
    out.append(f"word angles {r.angles}")
    if r.violations:
        out.append("violations " + " ".join(
            f"{kind}@{start}" for kind, start in r.violations))
    else:
        out.append("violations none")
    return "\n".join(out) + "\n"


def _parse_chain_lines(lines: list[str]) -> ChainReport:
    primes = []
    colors = angles = None
    violations: tuple[tuple[str, int], ...] = ()
    for ln in lines:
        f = ln.split(" ")
        if f[0] == "prime":
            if (len(f) != 8 or f[2] != "class" or f[4] != "angle"
                    or f[6] != "side" or int(f[1]) != len(primes)):
                raise FormatError(f"bad prime line: {ln!r}")
            cid, ang, side = int(f[3]), int(f[5]), f[7]
            if cid not in range(1, 7) or ang not in (4, 6, 8) \
                    or side not in ("L", "R"):
                raise FormatError(f"bad prime attributes: {ln!r}")
            primes.append((cid, ang, side))
        elif ln.startswith("word colors "):
            colors = ln[12:]
            if set(colors) - set("RGB"):
                raise FormatError(f"bad color word {colors!r}")
        elif ln.startswith("word angles "):
            angles = ln[12:]
            if set(angles) - set("468"):
                raise FormatError(f"bad angle word {angles!r}")
        elif ln == "violations none":
            violations = ()
        elif ln.startswith("violations "):
            items = []
            for tok in ln[11:].split(" "):
                kind, _, start = tok.rpartition("@")
                if not kind:
                    raise FormatError(f"bad violation token {tok!r}")
                items.append((kind, int(start)))
            violations = tuple(items)
        else:
            raise FormatError(f"bad chain line: {ln!r}")
    if colors is None or angles is None:
        raise FormatError("chain report must contain both words")
    if len(angles) != len(primes):
        raise FormatError("angle word length must equal prime count")
    return ChainReport(tuple(primes), colors, angles, violations)


def read_chain(text: str) -> ChainReport:
    return _parse_chain_lines(_lines(text, "CHAIN v1"))


# ---------------------------------------------------------------------------
# EXTEND v1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtendReport:
    """Outcome of a bidirectional chain extension search."""

    seed: str                   # name of the seed chain file
    leftmax: int
    rightmax: int
    target: int
    met: bool
    best: ChainReport


def write_extend(r: ExtendReport) -> str:
    head = ("EXTEND v1\n"
            f"seed {r.seed}\n"
            f"leftmax {r.leftmax} rightmax {r.rightmax} "
            f"target {r.target} met {1 if r.met else 0}\n")
    return head + write_chain(r.best)


def read_extend(text: str) -> ExtendReport:
    lines = _lines(text, "EXTEND v1")
    if len(lines) < 3 or not lines[0].startswith("seed "):
        raise FormatError("bad EXTEND header")
    seed = lines[0][5:]
    f = lines[1].split(" ")
    if (len(f) != 8 or f[0] != "leftmax" or f[2] != "rightmax"
            or f[4] != "target" or f[6] != "met" or f[7] not in "01"):
        raise FormatError("bad EXTEND summary line")
    if lines[2] != "CHAIN v1":
        raise FormatError("EXTEND report must embed a CHAIN v1 block")
    best = _parse_chain_lines(lines[3:])
    return ExtendReport(seed=seed, leftmax=int(f[1]), rightmax=int(f[3]),
                        target=int(f[5]), met=f[7] == "1", best=best)
