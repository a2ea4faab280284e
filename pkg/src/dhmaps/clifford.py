"""Complex matrix realisation of the Clifford algebra of Euclidean R^n.

Generators satisfy ``g_a g_b + g_b g_a = -2 delta_ab`` and are anti-Hermitian,
so Clifford multiplication by a vector is skew for the Hermitian product
``inner``. For n = 2 the generators are

    e1 -> [[0, 1], [-1, 0]],    e2 -> [[0, i], [i, 0]].
"""

from dataclasses import dataclass, field

import numpy as np

MAX_DIM = 8

SIGMA1 = np.array([[0, 1], [-1, 0]], dtype=complex)
SIGMA2 = np.array([[0, 1j], [1j, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class CliffordRep:
    n: int
    generators: tuple = field(repr=False)

    @property
    def fiber_dim(self):
        return self.generators[0].shape[0]

    def matrix(self, v):
        """Matrix of Clifford multiplication by the vector ``v``."""
        v = np.asarray(v)
        if v.shape != (self.n,):
            raise ValueError(f"vector of length {self.n} expected, got shape {v.shape}")
        return np.tensordot(v, np.asarray(self.generators), axes=1)

    def volume(self):
        """Product g_1 g_2 ... g_n."""
        out = np.eye(self.fiber_dim, dtype=complex)
        for g in self.generators:
            out = out @ g
        return out


def fiber_dimension(n):
    return 2 ** (n // 2)


def _even_generators(n):
    gens = [SIGMA1, SIGMA2]
    for _ in range(2, n, 2):
        eye = np.eye(gens[0].shape[0], dtype=complex)
        gens = [np.kron(g, _Z) for g in gens] + [np.kron(eye, SIGMA1), np.kron(eye, SIGMA2)]
    return gens


def build_representation(n, max_dim=MAX_DIM):
    """Clifford generators for R^n acting on C^(2^(n//2))."""
    if not isinstance(n, (int, np.integer)) or n < 1 or n > max_dim:
        raise ValueError(f"dimension must be an integer in [1, {max_dim}], got {n!r}")
    n = int(n)
    if n == 1:
        gens = [np.array([[1j]])]
    else:
        gens = _even_generators(n - n % 2)
        if n % 2:
            prod = np.eye(gens[0].shape[0], dtype=complex)
            for g in gens:
                prod = prod @ g
            # prod squares to +-1; pick the phase making the last generator square to -1
            sign = np.real(np.trace(prod @ prod)) / prod.shape[0]
            gens.append(1j * prod if sign > 0 else prod)
    gens = tuple(np.array(g, dtype=complex) for g in gens)
    for g in gens:
        g.setflags(write=False)
    return CliffordRep(n, gens)


def act(rep, v, xi):
    """Clifford product ``v . xi``."""
    xi = np.asarray(xi)
    if xi.shape[0] != rep.fiber_dim:
        raise ValueError(f"spinor of length {rep.fiber_dim} expected, got {xi.shape[0]}")
    return rep.matrix(v) @ xi


def inner(xi, eta):
    """Hermitian product, conjugate-linear in the first slot."""
    xi = np.asarray(xi)
    eta = np.asarray(eta)
    if xi.shape != eta.shape:
        raise ValueError(f"spinor shapes differ: {xi.shape} vs {eta.shape}")
    return np.vdot(xi, eta)


def relation_defect(rep):
    """Max entry of ``g_a g_b + g_b g_a + 2 delta_ab`` over all pairs."""
    eye = np.eye(rep.fiber_dim)
    worst = 0.0
    for a, ga in enumerate(rep.generators):
        for b, gb in enumerate(rep.generators):
            d = ga @ gb + gb @ ga + 2.0 * (a == b) * eye
            worst = max(worst, float(np.abs(d).max()))
    return worst


def anti_hermitian_defect(rep):
    return max(float(np.abs(g.conj().T + g).max()) for g in rep.generators)
