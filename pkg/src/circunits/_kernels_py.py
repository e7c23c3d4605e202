"""Pure numpy versions of the modular evaluation kernels.

All arithmetic is on int64 with a modulus q < 2**31, so products fit.
"""

import numpy as np


def modpow(base, exp, q):
    """Elementwise base**exp mod q for an array base and a scalar exp >= 0."""
    base = np.asarray(base, dtype=np.int64) % q
    out = np.ones_like(base)
    e = int(exp)
    while e:
        if e & 1:
            out = out * base % q
        base = base * base % q
        e >>= 1
    return out


def modinv(a, q):
    return modpow(a, q - 2, q)


def symbol_values(W, X, offsets, T, N, q):
    """V[g, t] = prod_{x in X[offsets[g]:offsets[g+1]]} (1 - W[x * T[t] mod N]) mod q."""
    W = np.asarray(W, dtype=np.int64)
    X = np.asarray(X, dtype=np.int64)
    T = np.asarray(T, dtype=np.int64)
    ng = len(offsets) - 1
    V = np.ones((ng, len(T)), dtype=np.int64)
    for g in range(ng):
        xs = X[offsets[g]:offsets[g + 1]]
        if len(xs) == 0:
            continue
        E = np.outer(xs, T) % N
        F = (1 - W[E]) % q
        acc = F[0]
        for row in F[1:]:
            acc = acc * row % q
        V[g] = acc
    return V


def relation_products(V, rowptr, idx, exps, q):
    """Positive and negative parts of each sparse exponent row, evaluated mod q."""
    V = np.asarray(V, dtype=np.int64)
    nrel = len(rowptr) - 1
    P = np.ones((nrel, V.shape[1]), dtype=np.int64)
    Q = np.ones((nrel, V.shape[1]), dtype=np.int64)
    for r in range(nrel):
        for k in range(rowptr[r], rowptr[r + 1]):
            e = int(exps[k])
            if e > 0:
                P[r] = P[r] * modpow(V[idx[k]], e, q) % q
            elif e < 0:
                Q[r] = Q[r] * modpow(V[idx[k]], -e, q) % q
    return P, Q
