"""numba kernels for tree sampling and inversion counting.

All randomness is drawn by the caller with numpy and passed in, so each
kernel is a deterministic function of its arguments.  Trees are exchanged
as parent-by-label arrays: ``parent[v]`` is the parent of label ``v``, ``0``
marks the root, index 0 is unused.  Ordered shapes travel as preorder
parent-position arrays (``pp[0] = -1``, ``pp[k] < k``).
"""

from __future__ import annotations

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)


# -- inversion counting ------------------------------------------------------

@njit(**_JIT)
def inversions_by_label(parent):
    """``out[j]`` = number of ancestors of ``j`` with a larger label.

    DFS from the root, with a Fenwick tree over label values holding the
    labels on the current root path.
    """
    n = parent.shape[0] - 1
    out = np.zeros(n + 1, np.int64)
    if n == 0:
        return out
    start = np.zeros(n + 2, np.int64)
    root = 0
    for v in range(1, n + 1):
        p = parent[v]
        if p == 0:
            root = v
        else:
            start[p + 1] += 1
    for v in range(1, n + 2):
        start[v] += start[v - 1]
    fill = start.copy()
    kids = np.empty(max(n - 1, 1), np.int64)
    for v in range(1, n + 1):
        p = parent[v]
        if p != 0:
            kids[fill[p]] = v
            fill[p] += 1
    fen = np.zeros(n + 1, np.int64)
    stack = np.empty(n, np.int64)
    it = np.empty(n, np.int64)
    active = 0
    sp = 0
    v = root
    while True:
        # enter v
        below = 0
        i = v
        while i > 0:
            below += fen[i]
            i -= i & (-i)
        out[v] = active - below
        i = v
        while i <= n:
            fen[i] += 1
            i += i & (-i)
        active += 1
        stack[sp] = v
        it[sp] = start[v]
        sp += 1
        # descend to the next unvisited child, leaving finished nodes
        v = 0
        while sp > 0:
            top = stack[sp - 1]
            if it[sp - 1] < start[top + 1]:
                v = kids[it[sp - 1]]
                it[sp - 1] += 1
                break
            i = top
            while i <= n:
                fen[i] -= 1
                i += i & (-i)
            active -= 1
            sp -= 1
        if v == 0:
            break
    return out


@njit(**_JIT)
def total_inversions(parent):
    return inversions_by_label(parent).sum()


@njit(**_JIT)
def local_inversions(parent, j):
    """Ancestors of ``j`` with label ``> j``; walks up the root path."""
    c = 0
    a = parent[j]
    while a != 0:
        if a > j:
            c += 1
        a = parent[a]
    return c


@njit(**_JIT)
def _stat(parent, j):
    if j == 0:
        return total_inversions(parent)
    return local_inversions(parent, j)


@njit(**_JIT)
def label_preorder(pp, perm):
    """Parent-by-label array for a preorder shape whose ``k``-th node carries label ``perm[k]``."""
    n = pp.shape[0]
    parent = np.zeros(n + 1, np.int64)
    for k in range(1, n):
        parent[perm[k]] = perm[pp[k]]
    return parent


# -- binary: Remy ------------------------------------------------------------

@njit(**_JIT)
def remy_preorder(picks, sides):
    """Uniform binary tree with ``n = len(picks)`` nodes, as preorder parent positions.

    Also returns ``code[k]`` = 2 * (node k has a left child) + (has a right child),
    which keeps the left/right distinction the ordered representation drops.
    Grows a complete binary tree with ``n`` internal nodes; step ``i`` picks one
    of the ``2i - 1`` existing nodes (``picks[i-1]``) and inserts a new
    internal node above it, with the new leaf on the side ``sides[i-1]``.
    The internal nodes, with their left/right structure, form the binary tree.
    """
    n = picks.shape[0]
    m = 2 * n + 1
    left = np.full(m, -1, np.int64)
    right = np.full(m, -1, np.int64)
    par = np.full(m, -1, np.int64)
    root = 0
    for i in range(1, n + 1):
        x = picks[i - 1]
        u = 2 * i - 1
        leaf = 2 * i
        p = par[x]
        if p == -1:
            root = u
        elif left[p] == x:
            left[p] = u
        else:
            right[p] = u
        par[u] = p
        if sides[i - 1]:
            left[u] = x
            right[u] = leaf
        else:
            left[u] = leaf
            right[u] = x
        par[x] = u
        par[leaf] = u
    pp = np.empty(n, np.int64)
    code = np.zeros(n, np.int64)
    pos = np.full(m, -1, np.int64)
    stack = np.empty(m, np.int64)
    sp = 0
    stack[0] = root
    sp = 1
    k = 0
    while sp > 0:
        sp -= 1
        v = stack[sp]
        if v % 2 == 0:
            continue  # leaf
        pos[v] = k
        pp[k] = -1 if par[v] == -1 else pos[par[v]]
        code[k] = 2 * (left[v] % 2) + right[v] % 2
        k += 1
        stack[sp] = right[v]
        stack[sp + 1] = left[v]
        sp += 2
    return pp, code


# -- ordered: ballot sequences and the cycle lemma ---------------------------

@njit(**_JIT)
def lukasiewicz_preorder(deg, rotate):
    """Preorder parent positions from out-degrees.

    With ``rotate`` the degree word is first cyclically shifted to start right
    after the first minimum of its partial sums ``sum (d_i - 1)``; by the cycle
    lemma exactly this rotation is a valid preorder degree word.
    """
    n = deg.shape[0]
    shift = 0
    if rotate:
        s = 0
        best = 1
        for i in range(n):
            s += deg[i] - 1
            if s < best:
                best = s
                shift = i + 1
        shift %= n
    pp = np.empty(n, np.int64)
    stack = np.empty(n, np.int64)
    left = np.empty(n, np.int64)
    sp = 0
    for k in range(n):
        d = deg[(k + shift) % n]
        if k == 0:
            pp[0] = -1
        else:
            pp[k] = stack[sp - 1]
            left[sp - 1] -= 1
            if left[sp - 1] == 0:
                sp -= 1
        if d > 0:
            stack[sp] = k
            left[sp] = d
            sp += 1
    return pp


@njit(**_JIT)
def tokens_to_degrees(tokens, n):
    """Stars-and-bars: ``n - 1`` bars (0) split ``n - 1`` stars (1) into ``n`` counts."""
    deg = np.zeros(n, np.int64)
    g = 0
    for t in tokens:
        if t:
            deg[g] += 1
        else:
            g += 1
    return deg


# -- unordered: Pruefer -------------------------------------------------------

@njit(**_JIT)
def pruefer_parent(seq, n, root):
    """Cayley tree from a Pruefer sequence over ``1..n``, rerooted at ``root``."""
    parent = np.zeros(n + 1, np.int64)
    if n == 1:
        return parent
    deg = np.ones(n + 1, np.int64)
    for x in seq:
        deg[x] += 1
    ptr = 1
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    for x in seq:
        parent[leaf] = x  # decoding roots the tree at n
        deg[leaf] -= 1
        deg[x] -= 1
        if deg[x] == 1 and x < ptr:
            leaf = x
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    parent[leaf] = n
    parent[n] = 0
    # reverse the path root -> n
    prev = 0
    v = root
    while v != 0:
        nxt = parent[v]
        parent[v] = prev
        prev = v
        v = nxt
    return parent


# -- Galton-Watson with alias tables ------------------------------------------

@njit(**_JIT)
def gw_attempts(prob, alias, u, n, max_attempts, deg):
    """Run attempts on the uniforms ``u`` until one has exactly ``n`` nodes.

    An attempt is abandoned as soon as it cannot finish within ``n`` nodes.
    A new attempt starts only while ``n`` uniforms remain.  Returns
    ``(accepted, uniforms_used, attempts)``; on acceptance ``deg`` holds the
    preorder degree word.
    """
    K = prob.shape[0]
    pos = 0
    attempts = 0
    while pos + n <= u.shape[0] and attempts < max_attempts:
        attempts += 1
        remaining = 1
        count = 0
        while True:
            x = u[pos] * K
            pos += 1
            i = int(x)
            if i >= K:
                i = K - 1
            d = i if x - i < prob[i] else alias[i]
            deg[count] = d
            count += 1
            remaining += d - 1
            if remaining == 0 or count + remaining > n:
                break
        if remaining == 0 and count == n:
            return True, pos, attempts
    return False, pos, attempts


# -- block statistics -----------------------------------------------------------

@njit(**_JIT)
def remy_block(picks, sides, perms, j):
    B = picks.shape[0]
    out = np.empty(B, np.int64)
    for b in range(B):
        out[b] = _stat(label_preorder(remy_preorder(picks[b], sides[b])[0], perms[b]), j)
    return out


@njit(**_JIT)
def ballot_block(tokens, perms, j):
    B, n = perms.shape
    out = np.empty(B, np.int64)
    for b in range(B):
        pp = lukasiewicz_preorder(tokens_to_degrees(tokens[b], n), True)
        out[b] = _stat(label_preorder(pp, perms[b]), j)
    return out


@njit(**_JIT)
def pruefer_block(seqs, roots, n, j):
    B = roots.shape[0]
    out = np.empty(B, np.int64)
    for b in range(B):
        out[b] = _stat(pruefer_parent(seqs[b], n, roots[b]), j)
    return out
