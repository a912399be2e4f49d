"""Exact space for pyramids and roads, with a replayed witness."""

from pebblekit import min_pebbles
from pebblekit.engine import configurations
from pebblekit.generators import pyramid, road

for h in range(1, 5):
    res = min_pebbles(pyramid(h))
    print(f"pyramid height {h}: {pyramid(h).n} nodes, {res.optimum} pebbles, witness of {len(res.witness.moves)} moves")

g = pyramid(3)
res = min_pebbles(g)
configs = configurations(g, res.witness)
print("\npyramid(3) witness, pebbled set after each move:")
for move, cfg in zip(res.witness.moves, configs[1:]):
    print(f"  {move.op:<12} {sorted(cfg.pebbled)}")

print("\nroads: outputs O of a width-w road cost w + |O| - 1")
for w in (2, 3):
    for outs in ([1], list(range(1, w + 1))):
        got = min_pebbles(road(w, targets=outs)).optimum
        print(f"  w={w} O={outs}: {got} (law gives {w + len(outs) - 1})")
