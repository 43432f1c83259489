"""Growing patch context and extending caterpillar chains prime by prime.

The six prime chain shapes are rigid, so all prime chains in a patch can
be found by exact template matching: place each canonical chain at a
star under all 20 isometries and look the tiles up by coordinates.  No
tree search is involved, which keeps bidirectional chain extension cheap
even in large grown patches.

Extension is the computational companion of the bi-infinite question:
seeds whose angle word already contains an excluded pattern stall or are
rejected, while cape-4 seeds keep growing as the context grows.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

from .ring import Cyclo10, phi_power
from .geometry import Patch, Tile, inflate
from .dualgraph import P2Graph
from .stargraph import StarGraph
from .flis import Budget, BudgetExceeded, InducedSubtree, induced_subtree, \
    leaf_count, leaf_function_formula
from .caterpillar import ANGLE_OF_CLASS, CLASS_SIGNATURES, CaterpillarChain, \
    PrimeCaterpillar, decompose, forbidden_patterns, graft, locate_prime, \
    prime_side, tiles_from_signature

#: canonical-frame position of the home star for each class's template
_TEMPLATE_HOME = {
    1: Cyclo10(0, -1, -1, -1), 2: Cyclo10(0, -1, -1, -1),
    3: Cyclo10(0, -1, -1, -1), 4: Cyclo10(1, 1, 1, 0),
    5: Cyclo10(-1, 1, 0, 2), 6: Cyclo10(-1, 1, 0, 2),
}

_TEMPLATES = {cid: tiles_from_signature(sig)
              for sig, cid in CLASS_SIGNATURES.items()}


def tile_index(p: Patch) -> dict:
    """Exact lookup table (kind, anchor coefficients, rotation) -> id."""
    return {(t.kind, t.anchor.coeffs, t.rot): i
            for i, t in enumerate(p.tiles)}


def _transformed_template(cid: int, star: Cyclo10, rot: int,
                          refl: bool) -> list[Tile]:
    """The class template mapped by the isometry that sends its home
    star to the given center, reflecting then rotating by rot."""
    home = _TEMPLATE_HOME[cid]
    out = []
    if refl:
        home = home.conj()
    shift = star - home.rotated(rot)
    for t in _TEMPLATES[cid]:
        if refl:
            t = t.reflected()
        out.append(Tile(t.kind, t.anchor.rotated(rot) + shift,
                        (t.rot + rot) % 10))
    return out


def chains_at_star(p: Patch, star: Cyclo10,
                   index: dict | None = None
                   ) -> list[tuple[int, tuple[int, ...]]]:
    """All prime chains homed at the given star center, as
    (class id, chain tile ids in template order), by template matching
    over the 20 isometries fixing the star.  Deduplicated by tile set."""
    if index is None:
        index = tile_index(p)
    seen = set()
    out = []
    for cid in sorted(_TEMPLATES):
        for refl in (False, True):
            for rot in range(10):
                ids = []
                for t in _transformed_template(cid, star, rot, refl):
                    i = index.get((t.kind, t.anchor.coeffs, t.rot))
                    if i is None:
                        break
                    ids.append(i)
                else:
                    key = frozenset(ids)
                    if key not in seen:
                        seen.add(key)
                        out.append((cid, tuple(ids)))
    return out


def find_prime_chains(p: Patch, g: P2Graph, sg: StarGraph
                      ) -> list[tuple[int, int, tuple[int, ...]]]:
    """Census of all prime chains in a patch: (class id, star index,
    chain tile ids).

    Only chains that complete to a full order-18 prime are reported;
    template matches whose leaf slots are blocked (patch boundary) are
    dropped.  The result agrees exactly with the chains derived from
    exhaustive subtree enumeration (tested), without any tree search.
    """
    index = tile_index(p)
    out = []
    for si, v in enumerate(sg.vertices):
        for cid, chain in chains_at_star(p, v.center, index):
            if next(complete_prime(g, chain), None) is not None:
                out.append((cid, si, chain))
    return out


def complete_prime(g: P2Graph, chain: Sequence[int],
                   require: int | None = None,
                   forbid: frozenset[int] = frozenset()
                   ) -> Iterator[InducedSubtree]:
    """All ways to extend an 8-tile prime chain to a full order-18 prime
    by choosing its 10 leaves: one per interior chain tile, two per end.

    require forces one specific tile into the leaf set; forbid excludes
    tiles (and proximity to them) so the completion can sit next to an
    existing chain without colliding.  Yields witnesses in a canonical
    deterministic order.
    """
    cset = set(chain)

    def slot_candidates(pos: int) -> list[int]:
        out = []
        for u in g.neighbors(chain[pos]):
            if u in cset or u in forbid:
                continue
            if sum(1 for v in g.neighbors(u) if v in cset) != 1:
                continue
            if u != require and any(v in forbid for v in g.neighbors(u)):
                continue
            out.append(u)
        return sorted(out)

    cands = [slot_candidates(i) for i in range(8)]
    if require is not None:
        hits = [i for i in range(8) if require in cands[i]]
        if len(hits) != 1:
            return
        # pin the required tile into its slot
        pos = hits[0]
        if pos in (0, 7):
            cands[pos] = [require] + [u for u in cands[pos] if u != require]
        else:
            cands[pos] = [require]

    need = [2, 1, 1, 1, 1, 1, 1, 2]

    def rec(pos: int, chosen: list[int]):
        if pos == 8:
            yield tuple(chosen)
            return
        pool = cands[pos]
        for pick in combinations(pool, need[pos]):
            if require is not None and pos in (0, 7) and pos == hits[0] \
                    and require not in pick:
                continue
            bad = False
            for u in pick:
                for v in g.neighbors(u):
                    if v in chosen or (v in pick and v != u):
                        bad = True
                        break
                if bad:
                    break
            if bad:
                continue
            yield from rec(pos + 1, chosen + list(pick))

    for leaves in rec(0, []):
        tiles = sorted(cset | set(leaves))
        try:
            t = induced_subtree(g, tiles)
        except ValueError:
            continue
        if leaf_count(t) == leaf_function_formula(t.order):
            yield t


# ---------------------------------------------------------------------------
# context growth
# ---------------------------------------------------------------------------

def grow_context(p: Patch, c: CaterpillarChain | None,
                 steps: int) -> tuple[Patch, Cyclo10]:
    """Inflate the patch `steps` times and return it with the exact
    anchor map factor: a reference coordinate z of the old patch
    corresponds to z * phi**steps in the new one.

    Old star centers land on star centers again after every even number
    of steps (stars become suns and back); the factor keeps the old
    star chain usable as a reference frame either way.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if c is not None:
        if any(i >= len(p.tiles) for i in c.tree.tiles):
            raise ValueError("chain is not embedded in the patch")
    return inflate(p, steps), phi_power(steps)


# ---------------------------------------------------------------------------
# bidirectional extension
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtensionOutcome:
    """Result of a bidirectional prime-at-a-time extension search."""

    leftmax: int
    rightmax: int
    target: int
    met: bool
    rejected: bool              # seed failed the forbidden-pattern gate
    chain: CaterpillarChain     # the longest chain reached (or the seed)
    nodes: int                  # graft attempts spent


def _candidate_steps(p: Patch, g: P2Graph, index: dict, centers: dict,
                     tree: InducedSubtree, outer: Cyclo10):
    """Grafting moves at the outer flank star of an end prime: every
    (junction tile, completed new prime) for every template chain homed
    there.  Deterministic order."""
    if outer not in centers:
        return
    treeset = set(tree.tiles)
    leaves = set(tree.leaves)
    for cid2, chain2 in chains_at_star(p, outer, index):
        if treeset & set(chain2):
            continue
        ends = (chain2[0], chain2[7])
        juncts = sorted(u for u in leaves
                        if any(g.has_edge(u, e) for e in ends))
        for tj in juncts:
            forbid = frozenset(treeset - {tj})
            for wit in complete_prime(g, chain2, require=tj,
                                      forbid=forbid):
                yield tj, wit


def _side_moves(p, g, sg, index, centers, tree, state, counter,
                max_nodes, leftward: bool):
    """Legal single-prime grafts at one end of the chain.  Yields
    (extended tree, new end state) where a state is
    (end prime, inner flank star, end side)."""
    end_pc, inner_star, end_side = state
    fl = list(end_pc.flanking_stars)
    if inner_star not in fl:
        raise ValueError("end prime's flanks disagree with the chain")
    fl.remove(inner_star)
    outer = fl[0]
    for tj, wit in _candidate_steps(p, g, index, centers, tree, outer):
        counter[0] += 1
        if max_nodes is not None and counter[0] > max_nodes:
            raise BudgetExceeded("extension node budget exhausted", None)
        try:
            u = graft(g, tree, wit, tj)
        except ValueError:
            continue
        new_pc = locate_prime(wit, p, g, sg)
        if new_pc.home_star != outer:
            continue
        nf = [s for s in new_pc.flanking_stars if s != end_pc.home_star]
        if len(nf) != 1 or nf[0] not in centers:
            continue       # keep the path on colored, in-patch stars
        if leftward:
            s_new = prime_side(new_pc, nf[0], end_pc.home_star, p, g)
        else:
            s_new = prime_side(new_pc, end_pc.home_star, nf[0], p, g)
        if s_new == end_side:
            continue       # alternation must hold at every graft
        yield u, (new_pc, end_pc.home_star, s_new)


def _extend_side(p, g, sg, index, centers, tree, state, depth, target,
                 counter, max_nodes, leftward: bool, track: list) -> bool:
    """Depth-first search growing one end of the seed prime by prime,
    with full backtracking over graft choices.  track keeps the deepest
    (depth, tree) reached, surviving a budget abort; returns True when
    the target depth is hit."""
    if depth > track[0]:
        track[0], track[1] = depth, tree
    if depth >= target:
        return True
    for u, nstate in _side_moves(p, g, sg, index, centers, tree, state,
                                 counter, max_nodes, leftward):
        if _extend_side(p, g, sg, index, centers, u, nstate, depth + 1,
                        target, counter, max_nodes, leftward, track):
            return True
    return False


def extend_chain(p: Patch, g: P2Graph, sg: StarGraph, c: CaterpillarChain,
                 target: int, budget: Budget | None = None
                 ) -> ExtensionOutcome:
    """How far the seed chain extends by whole primes in each direction.

    The two directions are searched independently from the seed:
    leftmax and rightmax each count the primes of a valid extended chain
    growing that way, and `chain` is the longer of the two witnesses.
    (Growing both arms inside one finite patch at once is typically
    blocked by leaf crowding where the arms approach each other, which
    says nothing about extendability in the infinite tiling; the
    per-direction maxima are the meaningful finite-context evidence.)

    Seeds carrying a forbidden pattern (a 4,4 angle pair, class-1 prime,
    cape 2 or cape 3) are rejected without search.  Each accepted step
    is validated by exact grafting, the leaf-count formula, and strict
    side alternation.  Raises BudgetExceeded with the partial outcome
    when the node budget runs out.
    """
    viol = forbidden_patterns(c)
    if viol:
        return ExtensionOutcome(0, 0, target, False, True, c, 0)
    if c.order % 17 != 1:
        raise ValueError("seed chain is not saturated")
    budget = budget or Budget(max_nodes=200000, witness_cap=None)
    index = tile_index(p)
    centers = {v.center: i for i, v in enumerate(sg.vertices)}
    counter = [0]
    lstate = (c.primes[0], c.star_chain[2], c.sides[0])
    rstate = (c.primes[-1], c.star_chain[-3], c.sides[-1])
    ltrack: list = [0, c.tree]
    rtrack: list = [0, c.tree]
    try:
        _extend_side(p, g, sg, index, centers, c.tree, lstate, 0, target,
                     counter, budget.max_nodes, True, ltrack)
        _extend_side(p, g, sg, index, centers, c.tree, rstate, 0, target,
                     counter, budget.max_nodes, False, rtrack)
    except BudgetExceeded as e:
        btrack = ltrack if ltrack[0] >= rtrack[0] else rtrack
        partial = ExtensionOutcome(ltrack[0], rtrack[0], target, False,
                                   False, decompose(btrack[1], p, g, sg),
                                   counter[0])
        raise BudgetExceeded(e.reason, partial) from None
    btrack = ltrack if ltrack[0] >= rtrack[0] else rtrack
    final = decompose(btrack[1], p, g, sg)
    met = ltrack[0] >= target and rtrack[0] >= target
    return ExtensionOutcome(ltrack[0], rtrack[0], target, met, False,
                            final, counter[0])
