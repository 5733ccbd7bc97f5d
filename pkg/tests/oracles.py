"""Independent reference implementations used to cross-check the package."""

from __future__ import annotations

import functools
import itertools

from metamono.terms import ANON, FnPtr, Ground, Named, Ref, Static, Tuple, Var

# ---------------------------------------------------------------- truth tables


def truth_masks(n: int) -> tuple[int, list[int]]:
    """All-ones mask over 2**n assignments and one column mask per variable."""
    rows = 1 << n
    full = (1 << rows) - 1
    cols = []
    for k in range(n):
        m = 0
        for i in range(rows):
            if (i >> k) & 1:
                m |= 1 << i
        cols.append(m)
    return full, cols


# ---------------------------------------------------------------- Robinson unification


class RefUnifier:
    """Textbook unification with an explicit occurs check.

    Type variables and named lifetimes are variables; ``'static`` is a constant
    and the elided lifetime matches anything.
    """

    def __init__(self):
        self.b: dict = {}

    def walk(self, t):
        while isinstance(t, (Var, Named)) and t != ANON and t in self.b:
            t = self.b[t]
        return t

    def occurs(self, v, t) -> bool:
        t = self.walk(t)
        if t == v:
            return True
        if isinstance(t, Ground):
            return any(self.occurs(v, a) for a in t.args)
        if isinstance(t, Ref):
            return self.occurs(v, t.inner)
        if isinstance(t, Tuple):
            return any(self.occurs(v, a) for a in t.items)
        if isinstance(t, FnPtr):
            return any(self.occurs(v, a) for a in t.params) or self.occurs(v, t.ret)
        return False

    def lt(self, x, y) -> bool:
        x, y = self.walk(x), self.walk(y)
        if x == ANON or y == ANON or x == y:
            return True
        if isinstance(x, Named):
            self.b[x] = y
            return True
        if isinstance(y, Named):
            self.b[y] = x
            return True
        return False

    def unify(self, x, y) -> bool:
        x, y = self.walk(x), self.walk(y)
        if x == y:
            return True
        if isinstance(x, Var):
            if self.occurs(x, y):
                return False
            self.b[x] = y
            return True
        if isinstance(y, Var):
            return self.unify(y, x)
        if type(x) is not type(y):
            return False
        if isinstance(x, Ground):
            return x.path == y.path and len(x.args) == len(y.args) and all(self.unify(a, b) for a, b in zip(x.args, y.args))
        if isinstance(x, Ref):
            return x.mutable == y.mutable and self.lt(x.lifetime, y.lifetime) and self.unify(x.inner, y.inner)
        if isinstance(x, Tuple):
            return len(x.items) == len(y.items) and all(self.unify(a, b) for a, b in zip(x.items, y.items))
        return False

    def resolve(self, t):
        t = self.walk(t)
        if isinstance(t, Ground):
            return Ground(t.path, tuple(self.resolve(a) for a in t.args))
        if isinstance(t, Ref):
            return Ref(self.walk(t.lifetime), t.mutable, self.resolve(t.inner))
        if isinstance(t, Tuple):
            return Tuple(tuple(self.resolve(a) for a in t.items))
        return t


def same_modulo_elided(x, y) -> bool:
    """Structural equality where an elided lifetime matches any lifetime."""
    if isinstance(x, Ref) and isinstance(y, Ref):
        lt_ok = x.lifetime == ANON or y.lifetime == ANON or x.lifetime == y.lifetime
        return lt_ok and x.mutable == y.mutable and same_modulo_elided(x.inner, y.inner)
    if isinstance(x, Ground) and isinstance(y, Ground):
        return x.path == y.path and len(x.args) == len(y.args) and all(map(same_modulo_elided, x.args, y.args))
    if isinstance(x, Tuple) and isinstance(y, Tuple):
        return len(x.items) == len(y.items) and all(map(same_modulo_elided, x.items, y.items))
    return x == y


def match(pattern, target, binding=None) -> dict | None:
    """One-way matching: a binding making ``pattern`` equal to ``target``."""
    binding = {} if binding is None else binding
    if isinstance(pattern, (Var, Named)) and pattern != ANON:
        if pattern in binding:
            return binding if binding[pattern] == target else None
        binding[pattern] = target
        return binding
    if pattern == ANON and isinstance(target, (Named, Static)):
        return binding
    if type(pattern) is not type(target):
        return None
    if isinstance(pattern, Ground):
        if pattern.path != target.path or len(pattern.args) != len(target.args):
            return None
        for a, b in zip(pattern.args, target.args):
            if match(a, b, binding) is None:
                return None
        return binding
    if isinstance(pattern, Ref):
        if pattern.mutable != target.mutable:
            return None
        if match(pattern.lifetime, target.lifetime, binding) is None:
            return None
        return match(pattern.inner, target.inner, binding)
    if isinstance(pattern, Tuple):
        if len(pattern.items) != len(target.items):
            return None
        for a, b in zip(pattern.items, target.items):
            if match(a, b, binding) is None:
                return None
        return binding
    return binding if pattern == target else None


# ---------------------------------------------------------------- edit-script search


def forests(n: int, labels: str) -> list[tuple]:
    """Every ordered forest with exactly ``n`` nodes; a tree is ``(label, children)``."""
    return list(_forests(n, labels))


@functools.lru_cache(maxsize=None)
def _forests(n: int, labels: str) -> tuple:
    if n == 0:
        return ((),)
    out = []
    for k in range(1, n + 1):
        for kids in _forests(k - 1, labels):
            for lab in labels:
                for rest in _forests(n - k, labels):
                    out.append(((lab, kids),) + rest)
    return tuple(out)


def _deletions(f: tuple):
    for i, (lab, kids) in enumerate(f):
        yield f[:i] + kids + f[i + 1 :]
        for sub in _deletions(kids):
            yield f[:i] + ((lab, sub),) + f[i + 1 :]


def _relabels(f: tuple, labels: str):
    for i, (lab, kids) in enumerate(f):
        for other in labels:
            if other != lab:
                yield f[:i] + ((other, kids),) + f[i + 1 :]
        for sub in _relabels(kids, labels):
            yield f[:i] + ((lab, sub),) + f[i + 1 :]


class EditGraph:
    """Every forest up to ``max_nodes`` nodes, linked by single unit-cost edits.

    Insertion is the reverse of deletion, so the graph is undirected.  With
    unit costs an optimal script can delete first, relabel, then insert, so it
    never needs more nodes than the larger of the two trees; shortest paths in
    this bounded graph are therefore exact edit distances.
    """

    def __init__(self, max_nodes: int, labels: str = "abc"):
        import numpy as np
        from scipy.sparse import coo_matrix

        self.labels = labels
        self.nodes = [f for n in range(max_nodes + 1) for f in forests(n, labels)]
        self.index = {f: i for i, f in enumerate(self.nodes)}
        rows, cols = [], []
        for i, f in enumerate(self.nodes):
            for g in itertools.chain(_deletions(f), _relabels(f, labels)):
                rows.append(i)
                cols.append(self.index[g])
        data = np.ones(len(rows), dtype=np.int8)
        m = len(self.nodes)
        self.graph = coo_matrix((data, (rows, cols)), shape=(m, m)).tocsr()

    def trees(self, size: int) -> list[tuple]:
        return [f[0] for f in forests(size, self.labels) if len(f) == 1]

    def distances(self, sources: list[tuple]):
        """Edit distance from each source tree to every forest in the graph."""
        from scipy.sparse.csgraph import shortest_path

        idx = [self.index[(t,)] for t in sources]
        return shortest_path(self.graph, method="D", directed=False, unweighted=True, indices=idx)


def canonical_labelings(tree: tuple, labels: str) -> bool:
    """True when labels first appear in alphabet order (one representative per renaming)."""
    seen: list = []

    def go(t):
        lab, kids = t
        for k in kids:
            go(k)
        if lab not in seen:
            seen.append(lab)

    go(tree)
    return seen == sorted(seen, key=labels.index) and all(labels[i] == s for i, s in enumerate(seen))


# ---------------------------------------------------------------- specializability


def signatures_overlap(a: tuple, b: tuple) -> bool:
    """Whether two parameter-type lists admit a common instantiation.

    ``None`` entries stand for unconstrained generic positions.
    """
    u = RefUnifier()
    for x, y in zip(a, b):
        if x is None or y is None:
            continue
        if not u.unify(_tag(x, "a"), _tag(y, "b")):
            return False
    return True


def _tag(t, side):
    if isinstance(t, Var):
        return Var(f"{side}:{t.name}")
    if isinstance(t, Ground):
        return Ground(t.path, tuple(_tag(a, side) for a in t.args))
    if isinstance(t, Ref):
        lt = Named(f"{side}:{t.lifetime.name}") if isinstance(t.lifetime, Named) and t.lifetime != ANON else t.lifetime
        return Ref(lt, t.mutable, _tag(t.inner, side))
    if isinstance(t, Tuple):
        return Tuple(tuple(_tag(i, side) for i in t.items))
    return t


def brute_force_specializability(sigs: list[tuple]) -> str:
    """Already when every pair has a permutation of the second that cannot overlap the first.

    A parameter whose whole type is a generic is unconstrained.
    """
    sigs = [tuple(None if isinstance(t, Var) else t for t in s) for s in sigs]
    for a, b in itertools.combinations(sigs, 2):
        if len(a) != len(b):
            return "Newly"
        if all(signatures_overlap(a, tuple(b[i] for i in perm)) for perm in itertools.permutations(range(len(b)))):
            return "Newly"
    return "Already"
