import numpy as np
import pytest

from l1dilation.interval_space import IntervalMeasure, PwAffineBijection, make_partition
from l1dilation.markov_ops import L1Operator


def random_lengths(rng, k, total=1.0):
    w = rng.random(k) + 0.05
    return w / w.sum() * total


def random_interval_exchange(rng, k=None, preserve=False, total=1.0):
    """Random invertible piecewise-affine map of [0, total) onto itself.

    Source interval i goes onto target interval perm[i]; target lengths are
    independent of source lengths unless ``preserve``.
    """
    k = k or int(rng.integers(1, 6))
    src = random_lengths(rng, k, total)
    dst = src.copy() if preserve else random_lengths(rng, k, total)
    perm = rng.permutation(k)
    sbp = np.concatenate([[0.0], np.cumsum(src)])
    sbp[-1] = total
    # target slots laid out in the permuted order
    order = np.argsort(perm)
    tlen = dst[order] if not preserve else src[order]
    tbp = np.concatenate([[0.0], np.cumsum(tlen)])
    tbp[-1] = total
    pairs = []
    for i in range(k):
        slot = perm[i]
        pairs.append((((sbp[i], sbp[i + 1]),), ((tbp[slot], tbp[slot + 1]),)))
    return PwAffineBijection.from_boxes(pairs, ((0.0, total),), ((0.0, total),))


def random_measure(rng, total=1.0, full_support=True):
    k = int(rng.integers(1, 6))
    base = make_partition(random_lengths(rng, k, total), total=total)
    dens = rng.random(k) + (0.1 if full_support else 0.0)
    return IntervalMeasure(base, dens)


def random_ip_operator(rng, m):
    mu = random_lengths(rng, m)
    A = rng.random((m, m)) * (rng.random((m, m)) > 0.25)
    A[np.diag_indices(m)] += 0.05
    T = A * (mu / (mu @ A))[None, :]
    return L1Operator(make_partition(mu), T)


def random_contraction(rng, m):
    T = random_ip_operator(rng, m)
    scale = rng.uniform(0.0, 1.0, size=m)
    return L1Operator(T.base, T.matrix * scale[None, :])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
