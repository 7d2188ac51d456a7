"""Slow, loop-based reference implementations used only as test oracles.

Nothing here imports the package's information or simulation code, so a shared
bug cannot make both sides agree.
"""

import itertools
import math

import numpy as np


def digits(index: int, base: int, length: int) -> list[int]:
    out = []
    for _ in range(length):
        out.append(index % base)
        index //= base
    return out


def joint_table(channel, pi_a, pi_b) -> dict:
    """P(s, ta, tb, y) as a dict, accumulated one path at a time."""
    ps, ca, cb, w = channel.state_dist, channel.csi_a, channel.csi_b, channel.channel
    n_xa, n_xb, n_s, n_y = w.shape
    n_sa, n_sb = ca.shape[1], cb.shape[1]
    out = {}
    for s in range(n_s):
        for ta, pa in enumerate(pi_a):
            for tb, pb in enumerate(pi_b):
                da, db = digits(ta, n_xa, n_sa), digits(tb, n_xb, n_sb)
                for sa in range(n_sa):
                    for sb in range(n_sb):
                        base = ps[s] * pa * pb * ca[s, sa] * cb[s, sb]
                        for y in range(n_y):
                            key = (s, ta, tb, y)
                            out[key] = out.get(key, 0.0) + base * w[da[sa], db[sb], s, y]
    return out


def marginal(table: dict, keep) -> dict:
    out = {}
    for key, p in table.items():
        k = tuple(key[i] for i in keep)
        out[k] = out.get(k, 0.0) + p
    return out


def H(table: dict, keep) -> float:
    return -sum(p * math.log2(p) for p in marginal(table, keep).values() if p > 0)


def rate_triple(channel, pi_a, pi_b) -> tuple[float, float, float]:
    t = joint_table(channel, pi_a, pi_b)
    S, A, B, Y = 0, 1, 2, 3
    h_sab, h_sabY = H(t, (S, A, B)), H(t, (S, A, B, Y))
    r_a = H(t, (S, B, Y)) - H(t, (S, B)) - (h_sabY - h_sab)
    r_b = H(t, (S, A, Y)) - H(t, (S, A)) - (h_sabY - h_sab)
    r_sum = H(t, (S, Y)) - H(t, (S,)) - (h_sabY - h_sab)
    return r_a, r_b, r_sum


def typical(cols: list, joint: np.ndarray, epsilon: float) -> bool:
    """Subset-entropy typicality of the tuple of sequences ``cols`` against ``joint``,
    one axis of ``joint`` per sequence: every nonempty subset must have empirical
    log-probability rate within epsilon of its entropy."""
    k = len(cols)
    n = len(cols[0])
    for r in range(1, k + 1):
        for sub in itertools.combinations(range(k), r):
            drop = tuple(i for i in range(k) if i not in sub)
            m = joint.sum(axis=drop)
            h = -sum(p * math.log2(p) for p in m.ravel() if p > 0)
            logp = 0.0
            for t in range(n):
                p = m[tuple(cols[i][t] for i in sub)]
                if p == 0:
                    return False
                logp += math.log2(p)
            if not abs(-logp / n - h) < epsilon:
                return False
    return True


def unique_typical_pair(book_a, book_b, y, s, ref, epsilon):
    hits = [(i, j) for i in range(len(book_a)) for j in range(len(book_b))
            if typical([list(book_a[i]), list(book_b[j]), list(y), list(s)], ref, epsilon)]
    return hits[0] if len(hits) == 1 else None


def h_min(q, ps, csi_a, csi_b, pz) -> float:
    n_s, n_sa, n_sb = len(ps), csi_a.shape[1], csi_b.shape[1]
    best = math.inf
    for fa in itertools.product(range(q), repeat=n_sa):
        for fb in itertools.product(range(q), repeat=n_sb):
            h = 0.0
            for s in range(n_s):
                dist = [0.0] * q
                for sa in range(n_sa):
                    for sb in range(n_sb):
                        for z in range(q):
                            dist[(z + fa[sa] + fb[sb]) % q] += csi_a[s, sa] * csi_b[s, sb] * pz[s, z]
                h += ps[s] * -sum(p * math.log2(p) for p in dist if p > 0)
            best = min(best, h)
    return best
