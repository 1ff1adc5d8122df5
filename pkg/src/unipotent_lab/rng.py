"""Counter-based random streams.

Every stochastic operation derives its generator from ``stream(seed, *labels)``.
The key is a hash of the seed together with string labels (experiment name,
stratum index, ...), so results are reproducible for a fixed seed regardless
of evaluation order or worker count.
"""

import hashlib

import numpy as np


def stream(*key_parts) -> np.random.Generator:
    """Return a Philox generator keyed by a hash of the given parts."""
    text = "/".join(str(p) for p in key_parts)
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=16).digest()
    key = int.from_bytes(digest, "little")
    return np.random.Generator(np.random.Philox(key=key))


def jittered_grid(n: int, *key_parts) -> np.ndarray:
    """Midpoint-plus-jitter stratified sample of [0, 1] with n strata.

    Stratum i receives the i-th uniform of a single keyed stream, which makes
    the full vector independent of how strata are later distributed over
    workers.
    """
    u = stream(*key_parts, "jitter").random(n)
    return (np.arange(n) + u) / n
