"""Pure-Python optimiser kernel, the fallback backend.

This mirrors the compiled kernel (_kernel.pyx) statement for statement:
same splitmix64 shuffle stream, same visit order, same float arithmetic
order, so both backends return bit-identical partitions for a seed.
"""

from __future__ import annotations

BACKEND_NAME = "python"

GAIN_EPS = 1e-12  # single-move gains at or below this are noise, not progress

_MASK = (1 << 64) - 1


def _next_u64(state: int) -> tuple[int, int]:
    """splitmix64 step: returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def shuffle(order, n: int, state: int) -> int:
    """Fisher-Yates shuffle of 0..n-1 into order[:n]; returns new RNG state."""
    for i in range(n):
        order[i] = i
    for i in range(n - 1, 0, -1):
        state, z = _next_u64(state)
        j = z % (i + 1)
        order[i], order[j] = order[j], order[i]
    return state


def local_move(n, indptr, indices, weights, strength, two_m, gamma,
               labels, comm_strength, comm_size, order, comm_w, touched,
               state: int) -> tuple[int, int]:
    """Greedy single-node moves until no move gains more than GAIN_EPS.

    Visit order is reshuffled every pass. A node may also move to the
    lowest-numbered empty community. Ties in gain go to the lower community
    label. Zero-strength nodes stay put (and, having no edges, are never
    chosen as targets). comm_w must be all zeros on entry; it is restored.
    """
    inv2m = 1.0 / two_m
    total_moves = 0
    improved = True
    while improved:
        improved = False
        state = shuffle(order, n, state)
        for idx in range(n):
            v = order[idx]
            kv = strength[v]
            if kv <= 0.0:
                continue
            a = labels[v]
            ntouch = 0
            for e in range(indptr[v], indptr[v + 1]):
                c = labels[indices[e]]
                if comm_w[c] == 0.0:
                    touched[ntouch] = c
                    ntouch += 1
                comm_w[c] += weights[e]
            w_a = comm_w[a]
            k_rest = comm_strength[a] - kv
            best = a
            best_gain = 0.0
            for t in range(ntouch):
                c = touched[t]
                if c == a:
                    continue
                gain = 2.0 * inv2m * (
                    (comm_w[c] - w_a)
                    - gamma * kv * (comm_strength[c] - k_rest) * inv2m)
                if gain > best_gain or (gain == best_gain and best != a and c < best):
                    best_gain = gain
                    best = c
            if comm_size[a] > 1:
                empty = 0
                while comm_size[empty] != 0:
                    empty += 1
                gain = 2.0 * inv2m * (
                    (0.0 - w_a) - gamma * kv * (0.0 - k_rest) * inv2m)
                if gain > best_gain or (gain == best_gain and best != a and empty < best):
                    best_gain = gain
                    best = empty
            for t in range(ntouch):
                comm_w[touched[t]] = 0.0
            if best != a and best_gain > GAIN_EPS:
                labels[v] = best
                comm_strength[a] -= kv
                comm_strength[best] += kv
                comm_size[a] -= 1
                comm_size[best] += 1
                total_moves += 1
                improved = True
    return total_moves, state


def refine(n, indptr, indices, weights, strength, two_m, gamma,
           move_labels, refined, r_strength, r_size, order, comm_w, touched,
           state: int) -> tuple[int, int]:
    """One merge sweep from singletons, constrained within move communities.

    refined/r_strength/r_size must describe the all-singletons state on
    entry. Only nodes still alone may merge, so every node moves at most
    once; badly merged move communities fall apart into their well-knit
    cores, which aggregation then keeps as separate nodes.
    """
    inv2m = 1.0 / two_m
    merges = 0
    state = shuffle(order, n, state)
    for idx in range(n):
        v = order[idx]
        kv = strength[v]
        if kv <= 0.0:
            continue
        a = refined[v]
        if r_size[a] > 1:
            continue
        ml = move_labels[v]
        ntouch = 0
        for e in range(indptr[v], indptr[v + 1]):
            j = indices[e]
            if move_labels[j] != ml:
                continue
            c = refined[j]
            if comm_w[c] == 0.0:
                touched[ntouch] = c
                ntouch += 1
            comm_w[c] += weights[e]
        best = a
        best_gain = 0.0
        for t in range(ntouch):
            c = touched[t]
            if c == a:
                continue
            gain = 2.0 * inv2m * (
                comm_w[c] - gamma * kv * r_strength[c] * inv2m)
            if gain > best_gain or (gain == best_gain and best != a and c < best):
                best_gain = gain
                best = c
        for t in range(ntouch):
            comm_w[touched[t]] = 0.0
        if best != a and best_gain > GAIN_EPS:
            refined[v] = best
            r_strength[a] -= kv
            r_strength[best] += kv
            r_size[a] -= 1
            r_size[best] += 1
            merges += 1
    return merges, state
