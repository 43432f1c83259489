"""
Generating a patch and looking at it
====================================

The substitution rule turns every kite into two kites and a dart (half
of one on each side) and every dart into a kite and a dart, all at the
same physical size, so a few inflation rounds of the 5-kite "sun" seed
already produce a respectable piece of a Penrose P2 tiling.  All of the
geometry lives in the ring Z[zeta] of 10th-cyclotomic integers: four
integer coordinates per point, no floats anywhere.

Run from the repository root:

    python3 demos/01_generate_and_render.py

It writes sun4.svg next to itself.
"""
import os

from p2flis.geometry import inflate, seed_patch, validate_patch
from p2flis.render import svg_document

here = os.path.dirname(os.path.abspath(__file__))

# Five inflation rounds: 10 half-kites become 1805 half-tiles.
p0 = seed_patch("sun")
p = inflate(p0, 4)
print(f"seed: {len(p0.tiles)} tiles")
print(f"after 4 rounds: {len(p.tiles)} whole tiles "
      f"+ {len(p.halves)} boundary halves")

# The validator replays the matching rules with exact arithmetic.  An
# empty list means every shared edge agrees on its vertex colors and no
# two pieces overlap.
problems = validate_patch(p)
print(f"matching-rule violations: {len(problems)}")

# Tile counts follow the golden-ratio recurrence (a, b) -> (2a+b, a+b):
# the kite:dart ratio tends to phi.
q = p0
for k in range(6):
    kites = sum(1 for t in q.tiles for h in t.halves() if h.kind == "K") \
        + sum(1 for h in q.halves if h.kind == "K")
    darts = sum(1 for t in q.tiles for h in t.halves() if h.kind == "D") \
        + sum(1 for h in q.halves if h.kind == "D")
    print(f"  level {k}: {kites} half-kites, {darts} half-darts")
    q = inflate(q)

out = os.path.join(here, "sun4.svg")
with open(out, "w") as f:
    f.write(svg_document(p))
print(f"wrote {out}")
