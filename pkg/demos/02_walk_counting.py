"""
Refuting a pattern by counting short walks
==========================================

If more than m*k states are unreachable by walks longer than k, the rows of
A^l B for those states vanish for every l >= k.  The few remaining columns
cannot span R^n, whatever polynomial entries are chosen.
"""

import random

from avgctrl import SparsityPattern, analyze, averaged_rank_test
from avgctrl.construction import random_compliant_pair
from avgctrl.necessary import short_walk_profile

edges = [("b1", "a1"), ("b1", "a2"), ("a1", "a1"), ("a2", "a3"), ("a2", "a4")]
# a5 and a6 listen to everybody, including each other
edges += [(f"a{i}", "a5") for i in range(1, 7)] + [(f"a{i}", "a6") for i in range(1, 7)]
g = SparsityPattern.from_edges(6, 1, edges)

prof = short_walk_profile(g)
for k, members in prof.sets:
    print(f"k={k}: {sorted(map(str, members))}  (bound m*k = {g.m * k})")
# a2, a3, a4 are stuck: a2 is reached by one edge from b1, a3 and a4 by two.

print()
print(analyze(g).to_text())

# Try it: random monomial pairs never reach full averaged rank.
rng = random.Random(1)
for trial in range(5):
    a, b = random_compliant_pair(g, rng)
    trace = averaged_rank_test(a, b)
    print(f"trial {trial}: rank after j = 0..{trace.j_max}: {trace.rank} of {g.n}")
