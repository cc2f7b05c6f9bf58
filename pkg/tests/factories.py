"""Random faithful channels covering primitive, periodic and block structures."""

import numpy as np

from ebtimes.channel import Channel, hadamard_cycle, irreducible_period2, unitary_channel
from ebtimes.sampling import (
    block_diagonal_channel,
    conjugate_channel,
    random_channel,
    random_unitary,
)


def _block_unitary(dims, rng):
    d = sum(dims)
    v = np.zeros((d, d), dtype=complex)
    start = 0
    for db in dims:
        v[start:start + db, start:start + db] = random_unitary(db, rng)
        start += db
    return v


def block_mixture(dims, rng, q=0.6):
    """``q B + (1 - q) Ad(V)`` with ``B`` block diagonal and ``V`` a block unitary, in a random basis."""
    b = block_diagonal_channel([random_channel(db, rng=rng) for db in dims])
    v = unitary_channel(_block_unitary(dims, rng))
    mix = Channel(q * b.transfer + (1.0 - q) * v.transfer)
    return conjugate_channel(mix, random_unitary(sum(dims), rng))


def random_faithful(d, rng, kind):
    if kind == "primitive":
        return random_channel(d, rng=rng)
    if kind == "unitary":
        return unitary_channel(random_unitary(d, rng))
    if kind == "blocks":
        dims = [1, 1] if d == 2 else [2, 1]
        return block_mixture(dims, rng, q=float(rng.uniform(0.3, 0.9)))
    if kind == "periodic":
        if d == 2:
            return irreducible_period2(float(rng.uniform(0.2, 0.65)))
        return conjugate_channel(hadamard_cycle(d, float(rng.uniform(0.2, 0.8))), random_unitary(d, rng))
    raise ValueError(kind)


KINDS = ("primitive", "unitary", "blocks", "periodic")


def faithful_family(count, dims, seed):
    """``count`` faithful channels cycling through the kinds and dimensions."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        d = dims[i % len(dims)]
        kind = KINDS[(i // len(dims)) % len(KINDS)]
        out.append(random_faithful(d, rng, kind))
    return out
