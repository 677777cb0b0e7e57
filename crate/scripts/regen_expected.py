#!/usr/bin/env python3
"""Regenerate fixtures/*.expected.json by brute force.

This script is deliberately independent of the Rust crates: groups are closed
by breadth-first multiplication over raw image tuples, cosets are stored as
frozensets (no canonical representatives), incidence is literal set
intersection, and type-preserving automorphisms are enumerated with networkx's
VF2 matcher.  The Rust test suite compares its own results against the
snapshots written here.

Usage: python3 scripts/regen_expected.py [fixtures-dir]
"""
import itertools
import json
import re
import sys
from pathlib import Path

import networkx as nx

# ---------------------------------------------------------------------------
# permutations as image tuples; compose(p, q) applies p first, then q
# ---------------------------------------------------------------------------

def compose(p, q):
    return tuple(q[x] for x in p)

def inverse(p):
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)

def identity(n):
    return tuple(range(n))

def parse_perm(lit, degree):
    """Accept cycle notation "(0 1)(2 3)", image notation "[1,0,3,2]", or a list."""
    if isinstance(lit, list):
        img = lit
    else:
        text = lit.strip()
        if text.startswith("["):
            img = [int(t) for t in re.split(r"[,\s]+", text.strip("[]").strip()) if t]
        else:
            img = list(range(degree))
            body = text.replace(" ", ",")
            for cyc in re.findall(r"\(([^()]*)\)", body):
                pts = [int(t) for t in re.split(r"[,\s]+", cyc.strip()) if t]
                for a, b in zip(pts, pts[1:] + pts[:1]):
                    img[a] = b
    if sorted(img) != list(range(degree)):
        raise ValueError(f"not a degree-{degree} permutation: {lit!r}")
    return tuple(img)

def closure(gens, n):
    e = identity(n)
    if not gens:
        return frozenset({e})
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = compose(g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return frozenset(seen)

# ---------------------------------------------------------------------------
# coset incidence system built from literal coset sets
# ---------------------------------------------------------------------------

class System:
    def __init__(self, group, parabolics):
        self.group = sorted(group)
        self.n = len(self.group[0])
        self.parabolics = parabolics
        self.elements = []                    # (type, frozenset)
        self.cos_index = {}
        for t, gi in enumerate(parabolics):
            assigned = set()
            for g in self.group:
                if g in assigned:
                    continue
                members = frozenset(compose(h, g) for h in gi)
                assigned |= members
                self.cos_index[(t, members)] = len(self.elements)
                self.elements.append((t, members))
        self.m = len(self.elements)
        self.types = list(range(len(parabolics)))
        self.adj = [set() for _ in range(self.m)]
        for a in range(self.m):
            ta, ca = self.elements[a]
            for b in range(a + 1, self.m):
                tb, cb = self.elements[b]
                if ta != tb and ca & cb:
                    self.adj[a].add(b)
                    self.adj[b].add(a)

    def type_of(self, e):
        return self.elements[e][0]

    def counts(self):
        c = [0] * len(self.types)
        for t, _ in self.elements:
            c[t] += 1
        return c

    def flags_of_type(self, subset):
        out = []
        def rec(i, chosen, common):
            if i == len(subset):
                out.append(frozenset(chosen))
                return
            for e in sorted(common):
                if self.type_of(e) == subset[i]:
                    rec(i + 1, chosen + [e], common & self.adj[e])
        rec(0, [], set(range(self.m)))
        return out

    def is_geometry(self):
        for k in range(len(self.types)):
            for subset in itertools.combinations(self.types, k):
                for f in self.flags_of_type(list(subset)):
                    common = set(range(self.m))
                    for e in f:
                        common &= self.adj[e]
                    if not (common - f):
                        return False
        return True

    def residue_elements(self, flag):
        common = set(range(self.m))
        for e in flag:
            common &= self.adj[e]
        return common - set(flag)

    def subset_connected(self, elems):
        if len(elems) <= 1:
            return True
        start = next(iter(elems))
        seen, stack = {start}, [start]
        while stack:
            x = stack.pop()
            for y in self.adj[x]:
                if y in elems and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen == set(elems)

    def connected(self):
        return self.subset_connected(set(range(self.m)))

    def residually_connected(self):
        r = len(self.types)
        for k in range(0, r - 1):
            for subset in itertools.combinations(self.types, k):
                for f in self.flags_of_type(list(subset)):
                    if not self.subset_connected(self.residue_elements(f)):
                        return False
        return True

    def thin_firm(self):
        sizes = []
        for missing in self.types:
            subset = [t for t in self.types if t != missing]
            for f in self.flags_of_type(subset):
                sizes.append(len(self.residue_elements(f)))
        if not sizes:
            return True, True
        return all(s == 2 for s in sizes), all(s >= 2 for s in sizes)

    def automorphisms(self):
        g = nx.Graph()
        for e in range(self.m):
            g.add_node(e, t=self.type_of(e))
        for a in range(self.m):
            for b in self.adj[a]:
                if a < b:
                    g.add_edge(a, b)
        nm = nx.algorithms.isomorphism.categorical_node_match("t", -1)
        gm = nx.algorithms.isomorphism.GraphMatcher(g, g, node_match=nm)
        return sorted(tuple(mp[i] for i in range(self.m)) for mp in gm.isomorphisms_iter())

    def action_perms(self):
        out = set()
        for g in self.group:
            img = tuple(self.cos_index[(t, frozenset(compose(x, g) for x in cs))]
                        for t, cs in self.elements)
            out.add(img)
        return sorted(out)

def chamber_orbit_count(chambers, perms):
    idx = {c: i for i, c in enumerate(chambers)}
    parent = list(range(len(chambers)))
    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    for c in chambers:
        for p in perms:
            d = frozenset(p[e] for e in c)
            a, b = find(idx[c]), find(idx[d])
            if a != b:
                parent[a] = b
    return len({find(i) for i in range(len(chambers))})

def classify(sys_, chambers, auts):
    orbit = {}
    roots = []
    idx = {c: i for i, c in enumerate(chambers)}
    parent = list(range(len(chambers)))
    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    for c in chambers:
        for p in auts:
            d = frozenset(p[e] for e in c)
            a, b = find(idx[c]), find(idx[d])
            if a != b:
                parent[a] = b
    orbits = {}
    for i in range(len(chambers)):
        orbits.setdefault(find(i), []).append(i)
    k = len(orbits)
    if k == 1:
        return "flag_transitive", 1
    if k == 2:
        orb_of = {}
        for oi, members in enumerate(orbits.values()):
            for ci in members:
                orb_of[ci] = oi
        bytype = []
        for c in chambers:
            bytype.append({sys_.type_of(e): e for e in c})
        for i in range(len(chambers)):
            for j in range(i + 1, len(chambers)):
                diff = [t for t in sys_.types if bytype[i][t] != bytype[j][t]]
                if len(diff) == 1 and orb_of[i] == orb_of[j]:
                    return "neither", 2
        return "chiral", 2
    return "neither", k

# ---------------------------------------------------------------------------
# fixture modes
# ---------------------------------------------------------------------------

def parabolics_for(doc, group, gens, degree):
    mode = doc["mode"]
    if mode == "cgroup":
        return [closure([g for k, g in enumerate(gens) if k != i], degree)
                for i in range(len(gens))]
    if mode == "cplus":
        paras = [closure([compose(inverse(gens[0]), a) for a in gens[1:]], degree)]
        for i in range(1, len(gens) + 1):
            paras.append(closure([gens[j - 1] for j in range(1, len(gens) + 1) if j != i],
                                 degree))
        return paras
    if mode == "explicit":
        return [closure([parse_perm(lit, degree) for lit in sub], degree)
                for sub in doc["subgroups"]]
    raise ValueError(f"unknown mode {mode}")

def intersection_condition(doc, group, gens, degree):
    """IC for cgroup fixtures, IC+ for cplus fixtures; None for explicit."""
    mode = doc["mode"]
    if mode == "cgroup":
        n = len(gens)
        subsets = [s for k in range(n + 1) for s in itertools.combinations(range(n), k)]
        tab = {s: closure([gens[i] for i in s], degree) for s in subsets}
        ok = all(tab[a] & tab[b] == tab[tuple(sorted(set(a) & set(b)))]
                 for a in subsets for b in subsets)
        return ok, None
    if mode == "cplus":
        r = len(gens) + 1
        al = [identity(degree)] + list(gens)
        def gp(j_set):
            g = [compose(inverse(al[i]), al[j]) for i in j_set for j in j_set if i < j]
            return closure(g, degree)
        subsets = [s for k in range(r + 1) for s in itertools.combinations(range(r), k)]
        tab = {s: gp(s) for s in subsets}
        ok = all(tab[a] & tab[b] == tab[tuple(sorted(set(a) & set(b)))]
                 for a in subsets for b in subsets
                 if len(a) >= 2 and len(b) >= 2)
        indep = all(al[i] not in closure([al[j] for j in range(1, r) if j != i], degree)
                    for i in range(1, r))
        return ok, indep
    return None, None

def parabolic_union_generation(group, parabolics, degree):
    """For every type subset J with at least two types outside J, test
    intersection(G_j for j in J) == <union of the one-type-larger parabolics>."""
    r = len(parabolics)
    types = list(range(r))
    def g_j(j_set):
        acc = set(group)
        for j in j_set:
            acc &= parabolics[j]
        return frozenset(acc)
    for k in range(0, r - 1):
        for j_set in itertools.combinations(types, k):
            outside = [i for i in types if i not in j_set]
            gens = set()
            for i in outside:
                gens |= g_j(tuple(sorted(j_set + (i,))))
            if closure(sorted(gens), degree) != g_j(j_set):
                return False
    return True

def run_fixture(doc):
    degree = doc["degree"]
    gens = [parse_perm(lit, degree) for lit in doc.get("generators") or []]
    if doc["mode"] == "explicit":
        group_gens = gens or [parse_perm(lit, degree)
                              for sub in doc["subgroups"] for lit in sub]
    else:
        group_gens = gens
    group = closure(group_gens, degree)
    paras = parabolics_for(doc, group, gens, degree)
    sys_ = System(group, paras)
    ic, indep = intersection_condition(doc, group, gens, degree)
    bh = parabolic_union_generation(group, paras, degree)
    geom = sys_.is_geometry()
    chambers = sys_.flags_of_type(sys_.types)
    out = {
        "mode": doc["mode"],
        "rank": len(paras),
        "group_degree": degree,
        "group_order": len(group),
        "parabolic_orders": [len(p) for p in paras],
        "element_counts": sys_.counts(),
        "is_geometry": geom,
        "connected": sys_.connected(),
        "chamber_count": len(chambers),
        "action_chamber_orbit_count": chamber_orbit_count(chambers, sys_.action_perms()),
        "intersection_condition": ic,
        "independent": indep,
        "parabolic_union_generation": bh,
    }
    if geom:
        auts = sys_.automorphisms()
        kind, aut_orbits = classify(sys_, chambers, auts)
        thin, firm = sys_.thin_firm()
        rc = sys_.residually_connected()
        out.update({
            "thin": thin,
            "firm": firm,
            "residually_connected": rc,
            "aut_order": len(auts),
            "aut_chamber_orbit_count": aut_orbits,
            "classification": kind,
        })
        if thin and rc:
            verdict = {"flag_transitive": "regular_hypertope",
                       "chiral": "chiral_hypertope"}.get(kind, "hypertope")
        else:
            verdict = "not_a_hypertope"
        out["hypertope_verdict"] = verdict
    else:
        out.update({
            "thin": None, "firm": None, "residually_connected": None,
            "aut_order": None, "aut_chamber_orbit_count": None,
            "classification": None, "hypertope_verdict": "not_a_geometry",
        })
    if doc["mode"] == "cplus" and len(paras) == 3 and geom:
        base0 = sys_.cos_index[(0, frozenset(paras[0]))]
        res = sys_.residue_elements(frozenset([base0]))
        degs = [len(sys_.adj[x] & res) for x in res]
        out["type0_base_residue"] = {
            "size": len(res),
            "is_single_cycle": bool(res) and all(d == 2 for d in degs)
            and sys_.subset_connected(res),
        }
    else:
        out["type0_base_residue"] = None
    return out

def main():
    fixtures = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("fixtures")
    inputs = sorted(p for p in fixtures.glob("*.json")
                    if not p.name.endswith(".expected.json"))
    if not inputs:
        print(f"no fixture inputs found under {fixtures}/", file=sys.stderr)
        return 1
    for path in inputs:
        doc = json.loads(path.read_text())
        expected = run_fixture(doc)
        out_path = path.with_name(path.stem + ".expected.json")
        out_path.write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n")
        print(f"{path.name}: order={expected['group_order']} "
              f"counts={expected['element_counts']} "
              f"classification={expected['classification']} "
              f"rc={expected['residually_connected']}")
    return 0

if __name__ == "__main__":
    sys.exit(main())
