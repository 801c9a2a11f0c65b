"""
Hubs, authorities and eigencentrality on a single layer
=======================================================

A small ownership network scored two ways.  Directed links get hub and
authority scores; the undirected board layer gets eigencentrality.
"""

import numpy as np

from multinet.data import FIXTURE12
from multinet.netcore import read_edge_list
from multinet.pipeline import load_board
from multinet.spectral import eigencentrality, hits, rank1_svd

# A hand-made chain: x owns y and z, y owns z.
a = np.array([[0, 1, 1],
              [0, 0, 1],
              [0, 0, 0]], dtype=float)
res = hits(a)
print("hubs       ", np.round(res.hubs, 5))
print("authorities", np.round(res.authorities, 5))

# The same vectors are the leading singular pair of the matrix.
sigma, u, v = rank1_svd(a)
print("sigma^2 =", round(sigma**2, 6), "vs (3 + sqrt 5) / 2 =", round((3 + 5**0.5) / 2, 6))
print("max |h - u| =", np.abs(res.hubs - u).max())

# On a symmetric matrix the two scores coincide.
sym = a + a.T
r = hits(sym)
print("symmetric case, max |h - a| =", np.abs(r.hubs - r.authorities).max())

# The shipped fixture: shareholding stakes (self-holdings dropped).
# One stake, Foxtrot -> Golf at 51%, is twice as large as any other, and
# the leading singular pair of the layer collapses onto that single arc.
# Scores from one layer can hinge on one edge; the multilayer view in the
# next demo weighs it against board and market links.
sh = read_edge_list(FIXTURE12 / "shareholding.csv", self_loops="drop")
res = hits(sh)
print("\nshareholding layer, sigma =", round(res.sigma, 5))
print("  nonzero hubs:       ", {sh.labels[i]: round(float(res.hubs[i]), 5) for i in np.flatnonzero(res.hubs > 1e-8)})
print("  nonzero authorities:", {sh.labels[i]: round(float(res.authorities[i]), 5)
                                 for i in np.flatnonzero(res.authorities > 1e-8)})

# Board interlocks are undirected, so eigencentrality applies.
bd = load_board(FIXTURE12 / "board.csv")
ec = eigencentrality(bd)
print(f"\nboard layer: spectral radius {ec.eigenvalue:.5g}, converged={ec.converged}")
for i in np.argsort(-ec.scores)[:5]:
    print(f"  {bd.labels[i]:8s} {ec.scores[i]:.5g}")
