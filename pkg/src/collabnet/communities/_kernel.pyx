# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled optimiser kernel.

Statement-for-statement mirror of _kernel_py.py: same splitmix64 stream,
same visit order, same float arithmetic order (the build disables FP
contraction), so it returns bit-identical partitions to the fallback.
"""

BACKEND_NAME = "cython"

GAIN_EPS = 1e-12

cdef double _GAIN_EPS = 1e-12


cdef inline unsigned long long _mix(unsigned long long z) nogil:
    z = (z ^ (z >> 30)) * <unsigned long long>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <unsigned long long>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef unsigned long long _shuffle(long long[::1] order, Py_ssize_t n,
                                 unsigned long long state) nogil:
    cdef Py_ssize_t i, j
    cdef long long tmp
    cdef unsigned long long z
    for i in range(n):
        order[i] = i
    for i in range(n - 1, 0, -1):
        state = state + <unsigned long long>0x9E3779B97F4A7C15
        z = _mix(state)
        j = <Py_ssize_t>(z % <unsigned long long>(i + 1))
        tmp = order[i]
        order[i] = order[j]
        order[j] = tmp
    return state


def shuffle(long long[::1] order, Py_ssize_t n, state):
    """Fisher-Yates shuffle of 0..n-1 into order[:n]; returns new RNG state."""
    return int(_shuffle(order, n, <unsigned long long>state))


def local_move(Py_ssize_t n, long long[::1] indptr, long long[::1] indices,
               double[::1] weights, double[::1] strength, double two_m,
               double gamma, long long[::1] labels, double[::1] comm_strength,
               long long[::1] comm_size, long long[::1] order,
               double[::1] comm_w, long long[::1] touched, state):
    """Greedy single-node moves until no move gains more than GAIN_EPS."""
    cdef unsigned long long rng = <unsigned long long>state
    cdef double inv2m = 1.0 / two_m
    cdef long long total_moves = 0
    cdef bint improved = True
    cdef Py_ssize_t idx, t
    cdef long long v, a, c, e, best, empty, ntouch
    cdef double kv, w_a, k_rest, best_gain, gain
    with nogil:
        while improved:
            improved = False
            rng = _shuffle(order, n, rng)
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
                if best != a and best_gain > _GAIN_EPS:
                    labels[v] = best
                    comm_strength[a] -= kv
                    comm_strength[best] += kv
                    comm_size[a] -= 1
                    comm_size[best] += 1
                    total_moves += 1
                    improved = True
    return int(total_moves), int(rng)


def refine(Py_ssize_t n, long long[::1] indptr, long long[::1] indices,
           double[::1] weights, double[::1] strength, double two_m,
           double gamma, long long[::1] move_labels, long long[::1] refined,
           double[::1] r_strength, long long[::1] r_size, long long[::1] order,
           double[::1] comm_w, long long[::1] touched, state):
    """One merge sweep from singletons, constrained within move communities."""
    cdef unsigned long long rng = <unsigned long long>state
    cdef double inv2m = 1.0 / two_m
    cdef long long merges = 0
    cdef Py_ssize_t idx, t
    cdef long long v, a, c, e, j, ml, best, ntouch
    cdef double kv, best_gain, gain
    with nogil:
        rng = _shuffle(order, n, rng)
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
            if best != a and best_gain > _GAIN_EPS:
                refined[v] = best
                r_strength[a] -= kv
                r_strength[best] += kv
                r_size[a] -= 1
                r_size[best] += 1
                merges += 1
    return int(merges), int(rng)
