"""Space and time of the hard family, next to the 2x^k move bound.

At k = 2 every long-range edge starts at the single source, so holding it lets
one pebble slide down the whole path: the move count grows linearly in n.
"""

from pebblekit import min_moves, min_pebbles
from pebblekit.generators import hard_family

print(f"{'n':>3} {'k':>2} {'space':>5} {'moves(std)':>10} {'moves(bw)':>9} {'2x^k':>7}")
for n, k in [(10, 2), (14, 2), (18, 2), (26, 2), (21, 3)]:
    g = hard_family(n, k)
    space = min_pebbles(g).optimum
    t_std = min_moves(g, "standard", k).optimum
    t_bw = min_moves(g, "bw", k).optimum
    x = (n - k) / (2 * k)
    print(f"{n:>3} {k:>2} {space:>5} {t_std:>10} {t_bw:>9} {2 * x ** k:>7.1f}")
