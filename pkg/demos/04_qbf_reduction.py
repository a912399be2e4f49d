"""Build the gadget graph for a true formula and pebble it within 3Ku + 4K + 1."""

from pebblekit.qbf import evaluate_qbf, parse_qbf
from pebblekit.reduction import build_reduction, synthesize_strategy

TEXT = """\
c forall x1 exists x2: (x1 or x2 or x2) and (not x1 or not x2 or not x2)
p cnf 2 2
a 1 0
e 2 0
1 2 2 0
-1 -2 -2 0
"""

f = parse_qbf(TEXT)
policy = evaluate_qbf(f)
print("formula true:", policy.truth)
for K in (2, 3):
    dag, layout = build_reduction(f, K)
    rep = synthesize_strategy(dag, layout, f, policy)
    print(
        f"K={K}: {dag.n} nodes, {len(dag.edges)} edges, budget {layout.s}, "
        f"strategy uses {rep.space} pebbles over {rep.time} moves, complete={rep.complete}"
    )
