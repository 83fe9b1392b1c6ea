"""Compiled inner loops of the annealer.

Random draws go through the caller's ``numpy.random.Generator``; numba shares
its bit-generator state, so Python-side and compiled draws form one stream.

Evaluation state is a float vector: [uncovered targets, selected-but-unroutable
monitors, active sensors, sum of active normalised energy, round energy (J)].
"""

import numpy as np
from numba import njit

UNCOVERED, UNROUTABLE, ACTIVE, RESERVE, ENERGY = range(5)

# outer steps between from-scratch rebuilds of the incremental state
RESYNC_EVERY = 20


@njit(cache=True)
def move_for(bits, i, j, elig):
    """Bits to toggle for drawn index pair (i, j); (-1, -1) if eligibility blocks it.

    Distinct bits are swapped. Equal bits would make the swap a no-op, so the
    first index is flipped instead.
    """
    if bits[i] != bits[j]:
        k = j if bits[i] else i
        if elig[k]:
            return i, j
        return -1, -1
    if bits[i] or elig[i]:
        return i, -1
    return -1, -1


@njit(cache=True)
def propose(bits, elig, rng):
    n = bits.size
    if n < 2:
        return -1, -1
    for _ in range(n):
        i = rng.integers(0, n)
        j = rng.integers(0, n - 1)
        if j >= i:
            j += 1
        a, b = move_for(bits, i, j, elig)
        if a >= 0:
            return a, b
    return -1, -1


@njit(cache=True)
def accept(delta, temperature, rng):
    if delta > 0.0:
        return True
    return rng.random() < np.exp(delta / temperature)


@njit(cache=True)
def _flip(k, bits, cov_ptr, cov_idx, cover_cnt, routable, rel_ptr, rel_idx,
          relay_use, norm, cost, st):
    if not bits[k]:
        bits[k] = True
        for p in range(cov_ptr[k], cov_ptr[k + 1]):
            t = cov_idx[p]
            cover_cnt[t] += 1
            if cover_cnt[t] == 1:
                st[UNCOVERED] -= 1.0
        if routable[k]:
            st[ENERGY] += cost[k]
            if relay_use[k] == 0:
                st[ACTIVE] += 1.0
                st[RESERVE] += norm[k]
            for p in range(rel_ptr[k], rel_ptr[k + 1]):
                r = rel_idx[p]
                relay_use[r] += 1
                if relay_use[r] == 1 and not bits[r]:
                    st[ACTIVE] += 1.0
                    st[RESERVE] += norm[r]
        else:
            st[UNROUTABLE] += 1.0
    else:
        bits[k] = False
        for p in range(cov_ptr[k], cov_ptr[k + 1]):
            t = cov_idx[p]
            cover_cnt[t] -= 1
            if cover_cnt[t] == 0:
                st[UNCOVERED] += 1.0
        if routable[k]:
            st[ENERGY] -= cost[k]
            if relay_use[k] == 0:
                st[ACTIVE] -= 1.0
                st[RESERVE] -= norm[k]
            for p in range(rel_ptr[k], rel_ptr[k + 1]):
                r = rel_idx[p]
                relay_use[r] -= 1
                if relay_use[r] == 0 and not bits[r]:
                    st[ACTIVE] -= 1.0
                    st[RESERVE] -= norm[r]
        else:
            st[UNROUTABLE] -= 1.0


@njit(cache=True)
def fresh_state(bits, n_targets, cov_ptr, cov_idx, routable, rel_ptr, rel_idx, norm, cost):
    """Evaluation state of ``bits`` built from scratch in ascending sensor order."""
    n = bits.size
    work = np.zeros(n, dtype=np.bool_)
    cover_cnt = np.zeros(n_targets, dtype=np.int64)
    relay_use = np.zeros(n, dtype=np.int64)
    st = np.zeros(5)
    st[UNCOVERED] = n_targets
    for k in range(n):
        if bits[k]:
            _flip(k, work, cov_ptr, cov_idx, cover_cnt, routable, rel_ptr, rel_idx,
                  relay_use, norm, cost, st)
    return cover_cnt, relay_use, st


@njit(cache=True)
def score_of(st, w_count, w_energy, w_reserve, penalty):
    if st[UNCOVERED] > 0.0 or st[UNROUTABLE] > 0.0:
        return -penalty - st[UNCOVERED]
    active = st[ACTIVE]
    s = -w_count * active - w_energy * st[ENERGY] * 1e3
    if active > 0.0:
        s += w_reserve * st[RESERVE] / active
    return s


@njit(cache=True)
def score_full(bits, n_targets, cov_ptr, cov_idx, routable, rel_ptr, rel_idx, norm, cost,
               w_count, w_energy, w_reserve, penalty):
    _, _, st = fresh_state(bits, n_targets, cov_ptr, cov_idx, routable, rel_ptr, rel_idx,
                           norm, cost)
    return score_of(st, w_count, w_energy, w_reserve, penalty)


@njit(cache=True)
def anneal_kernel(bits0, elig, n_targets, cov_ptr, cov_idx, routable, rel_ptr, rel_idx,
                  norm, cost, w_count, w_energy, w_reserve, penalty,
                  t_init, cooling, inner_iters, t_min, max_stall, rng):
    bits = bits0.copy()
    cover_cnt, relay_use, st = fresh_state(bits, n_targets, cov_ptr, cov_idx, routable,
                                           rel_ptr, rel_idx, norm, cost)
    cur = score_of(st, w_count, w_energy, w_reserve, penalty)
    best = cur
    best_bits = bits.copy()
    temperature = t_init
    stall = 0
    outer = 0
    while temperature >= t_min and stall < max_stall:
        improved = False
        for _ in range(inner_iters):
            a, b = propose(bits, elig, rng)
            if a < 0:
                continue
            _flip(a, bits, cov_ptr, cov_idx, cover_cnt, routable, rel_ptr, rel_idx,
                  relay_use, norm, cost, st)
            if b >= 0:
                _flip(b, bits, cov_ptr, cov_idx, cover_cnt, routable, rel_ptr, rel_idx,
                      relay_use, norm, cost, st)
            new = score_of(st, w_count, w_energy, w_reserve, penalty)
            if accept(new - cur, temperature, rng):
                cur = new
                if new > best:
                    # incremental sums drift; only a from-scratch score may set a record
                    full = score_full(bits, n_targets, cov_ptr, cov_idx, routable, rel_ptr,
                                      rel_idx, norm, cost, w_count, w_energy, w_reserve,
                                      penalty)
                    if full > best:
                        best = full
                        best_bits[:] = bits
                        improved = True
            else:
                if b >= 0:
                    _flip(b, bits, cov_ptr, cov_idx, cover_cnt, routable, rel_ptr, rel_idx,
                          relay_use, norm, cost, st)
                _flip(a, bits, cov_ptr, cov_idx, cover_cnt, routable, rel_ptr, rel_idx,
                      relay_use, norm, cost, st)
        temperature *= cooling
        outer += 1
        stall = 0 if improved else stall + 1
        if outer % RESYNC_EVERY == 0:
            cover_cnt, relay_use, st = fresh_state(bits, n_targets, cov_ptr, cov_idx, routable,
                                                   rel_ptr, rel_idx, norm, cost)
            cur = score_of(st, w_count, w_energy, w_reserve, penalty)
    return best_bits, best, outer
