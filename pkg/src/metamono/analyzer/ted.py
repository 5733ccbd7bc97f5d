"""Zhang-Shasha tree edit distance with unit costs."""

from __future__ import annotations

from .trees import LabeledTree


class TreeTooLarge(Exception):
    pass


def _leftmost(t: LabeledTree) -> list[int]:
    lml = [0] * len(t)
    for i, kids in enumerate(t.children):
        lml[i] = lml[kids[0]] if kids else i
    return lml


def _keyroots(lml: list[int]) -> list[int]:
    seen: dict[int, int] = {}
    for i, l in enumerate(lml):
        seen[l] = i  # the highest node sharing a leftmost leaf
    return sorted(seen.values())


def tree_edit_distance(a: LabeledTree, b: LabeledTree, max_nodes: int = 20_000) -> int:
    """Minimum number of node insertions, deletions and relabelings turning ``a`` into ``b``."""
    if len(a) > max_nodes or len(b) > max_nodes:
        raise TreeTooLarge(f"tree has more than {max_nodes} nodes")
    la, lb = _leftmost(a), _leftmost(b)
    ka, kb = _keyroots(la), _keyroots(lb)
    A, B = a.labels, b.labels
    n, m = len(a), len(b)
    td = [[0] * m for _ in range(n)]
    for i in ka:
        li = la[i]
        for j in kb:
            lj = lb[j]
            rows, cols = i - li + 2, j - lj + 2
            fd = [[0] * cols for _ in range(rows)]
            for x in range(1, rows):
                fd[x][0] = x
            for y in range(1, cols):
                fd[0][y] = y
            for x in range(1, rows):
                ax = li + x - 1
                lax = la[ax]
                fx, fprev = fd[x], fd[x - 1]
                for y in range(1, cols):
                    by = lj + y - 1
                    if lax == li and lb[by] == lj:
                        cost = 0 if A[ax] == B[by] else 1
                        v = min(fprev[y] + 1, fx[y - 1] + 1, fprev[y - 1] + cost)
                        fx[y] = v
                        td[ax][by] = v
                    else:
                        p, q = lax - li, lb[by] - lj
                        fx[y] = min(fprev[y] + 1, fx[y - 1] + 1, fd[p][q] + td[ax][by])
    return td[n - 1][m - 1]
