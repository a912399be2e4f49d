"""White pebbles help on binary trees, though less than the closed form hopes at h = 2."""

from pebblekit import min_pebbles
from pebblekit.generators import binary_tree

for h in range(0, 4):
    g = binary_tree(h)
    std = min_pebbles(g, "standard").optimum
    bw = min_pebbles(g, "bw").optimum
    print(f"h={h}: standard {std}, black-white {bw}, floor((h+3)/2) = {(h + 3) // 2}")
