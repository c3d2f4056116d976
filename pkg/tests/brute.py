"""Brute-force oracles: exhaustive simple-path enumeration on tiny domains.

Deliberately naive and independent of the engine: recursive DFS over all
simple paths, accumulating weights left-to-right exactly as a shortest-path
relaxation would, so agreement with the engine is bit-exact.
"""

import math

from richlab.lattice import Domain, canonical_edge, neighbors


def brute_passage(dom: Domain, sources, field, type_index=1, x1_cap=None):
    """site -> (min passage time, source label) over all simple paths.

    Labels index the lexicographically sorted source list; ties go to the
    smaller label.  Sites unreachable under the x1 cap get (inf, -1).
    """
    sources = sorted(set(tuple(p) for p in sources))
    best = {p: (math.inf, -1) for p in dom.sites()}

    def weight(p, q):
        return field.edge_weight(canonical_edge(p, q), type_index)

    def dfs(p, dist, label, visited):
        t, lab = best[p]
        if dist < t or (dist == t and label < lab):
            best[p] = (dist, label)
        for q in neighbors(p, dom):
            if x1_cap is not None and q[0] > x1_cap:
                continue
            if q in visited:
                continue
            visited.add(q)
            dfs(q, dist + weight(p, q), label, visited)
            visited.remove(q)

    for label, s in enumerate(sources):
        if x1_cap is not None and s[0] > x1_cap:
            raise ValueError("source beyond the cap")
        dfs(s, 0.0, label, {s})
    return best
