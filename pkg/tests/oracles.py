"""Slow, independent reference implementations used only by the tests."""
import itertools

import numpy as np


def random_state(rng, dim=4, rank=None):
    rank = dim if rank is None else rank
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return a + a.conj().T


def random_unitary(rng, dim):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def kron_loops(a, b):
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


def partial_trace_loops(rho, keep, n):
    """Explicit index summation over the traced qubits."""
    keep = sorted(keep)
    traced = [q for q in range(n) if q not in keep]
    d = 2 ** len(keep)
    out = np.zeros((d, d), dtype=complex)

    def index(kept_bits, traced_bits):
        bits = [0] * n
        for q, b in zip(keep, kept_bits):
            bits[q] = b
        for q, b in zip(traced, traced_bits):
            bits[q] = b
        return int("".join(map(str, bits)), 2) if n else 0

    for r in itertools.product((0, 1), repeat=len(keep)):
        for c in itertools.product((0, 1), repeat=len(keep)):
            ri = int("".join(map(str, r)), 2) if keep else 0
            ci = int("".join(map(str, c)), 2) if keep else 0
            for t in itertools.product((0, 1), repeat=len(traced)):
                out[ri, ci] += rho[index(r, t), index(c, t)]
    return out


def charpoly_roots(h):
    """Eigenvalues via Faddeev-LeVerrier coefficients and companion-matrix roots."""
    n = h.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(h)
    for k in range(1, n + 1):
        m = h @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(h @ m) / k)
    roots = np.roots(coeffs)
    return np.sort(roots.real)[::-1]


def partial_swap_kraus(eta):
    """Kraus operators <j|U|0> of a partial-SWAP collision with ancilla |0>."""
    c, s = np.cos(eta), np.sin(eta)
    k0 = c * np.eye(2) + 1j * s * np.diag([1.0, 0.0])
    k1 = 1j * s * np.array([[0.0, 1.0], [0.0, 0.0]])
    return [k0, k1]


def choi_from_kraus(kraus):
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    proj = np.outer(phi, phi)
    return sum(np.kron(k, np.eye(2)) @ proj @ np.kron(k, np.eye(2)).conj().T for k in kraus)


def apply_by_permutation(rho, gate, wires, n):
    """Permute ``wires`` to the front, act with ``gate x I``, permute back."""
    rest = [q for q in range(n) if q not in wires]
    order = list(wires) + rest
    perm = np.zeros((2**n, 2**n))
    for idx in range(2**n):
        bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
        new = [bits[q] for q in order]
        perm[int("".join(map(str, new)), 2), idx] = 1
    full = np.kron(gate, np.eye(2 ** len(rest)))
    u = perm.T @ full @ perm
    return u @ rho @ u.conj().T


_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


def convex_roof_concurrence(rho, members=6, restarts=30, iterations=2000, seed=0):
    """Minimize the average pure-state concurrence over decompositions of ``rho``.

    Plain subgradient descent on isometries with step halving; returns an
    upper bound on the true concurrence that is tight in practice.
    """
    w, e = np.linalg.eigh(rho)
    keep = w > 1e-12
    big_w = e[:, keep] * np.sqrt(w[keep])
    tau = big_w.T @ _YY @ big_w
    rank = big_w.shape[1]
    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(restarts):
        u, _, vh = np.linalg.svd(rng.normal(size=(members, rank)) + 1j * rng.normal(size=(members, rank)),
                                 full_matrices=False)
        v = u @ vh
        f = np.abs(np.einsum("ki,ij,kj->k", v, tau, v)).sum()
        step = 0.2
        for _ in range(iterations):
            z = np.einsum("ki,ij,kj->k", v, tau, v)
            phase = np.where(np.abs(z) > 1e-14, z / np.maximum(np.abs(z), 1e-300), 0)
            grad = phase[:, None] * (v @ tau).conj()
            u, _, vh = np.linalg.svd(v - step * grad, full_matrices=False)
            cand = u @ vh
            fc = np.abs(np.einsum("ki,ij,kj->k", cand, tau, cand)).sum()
            if fc < f:
                v, f, step = cand, fc, step * 1.2
            else:
                step *= 0.5
            if step < 1e-10:
                break
        best = min(best, f)
    return best


def dense_gate(gate, wires, n):
    """Full register matrix of ``gate`` on ``wires``, by explicit bit manipulation."""
    dim = 2**n
    k = len(wires)
    u = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub = sum(bits[w] << (k - 1 - i) for i, w in enumerate(wires))
        for out_sub in range(2**k):
            amp = gate[out_sub, sub]
            if amp == 0:
                continue
            nb = list(bits)
            for i, w in enumerate(wires):
                nb[w] = (out_sub >> (k - 1 - i)) & 1
            row = sum(b << (n - 1 - q) for q, b in enumerate(nb))
            u[row, col] += amp
    return u
