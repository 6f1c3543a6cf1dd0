# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Twin of ``_pykernels``; see that module for contracts."""

import numpy as np
from cython.parallel cimport prange
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport calloc, free, malloc

cdef extern from "_kernels.h" nogil:
    uint64_t gs_next(uint64_t *s)
    double gs_random(uint64_t *s)
    uint64_t gs_randbelow(uint64_t *s, uint64_t m)
    double gs_exponential(uint64_t *s, double rate)
    void gs_lock(unsigned char *l)
    void gs_unlock(unsigned char *l)
    int64_t gs_fetch_add(int64_t *p, int64_t v)
    int64_t gs_exchange(int64_t *p, int64_t v)

cdef enum:
    MODE_DISTANCE = 0

BACKEND = "cython"


cdef inline int64_t descents(int64_t[::1] a) noexcept nogil:
    cdef Py_ssize_t k
    cdef int64_t c = 0
    for k in range(a.shape[0] - 1):
        if a[k] > a[k + 1]:
            c += 1
    return c


cdef inline int64_t local_desc(int64_t[::1] a, Py_ssize_t i, Py_ssize_t j,
                               Py_ssize_t n) noexcept nogil:
    cdef int64_t c = 0
    if i >= 1 and a[i - 1] > a[i]:
        c += 1
    if i < n - 1 and a[i] > a[i + 1]:
        c += 1
    if j - 1 != i and a[j - 1] > a[j]:
        c += 1
    if j < n - 1 and a[j] > a[j + 1]:
        c += 1
    return c


cdef inline bint cmpx(int64_t[::1] a, Py_ssize_t i, Py_ssize_t j,
                      Py_ssize_t n, int64_t *desc) noexcept nogil:
    cdef int64_t t
    if a[i] <= a[j]:
        return False
    desc[0] -= local_desc(a, i, j, n)
    t = a[i]
    a[i] = a[j]
    a[j] = t
    desc[0] += local_desc(a, i, j, n)
    return True


cdef inline void draw(uint64_t *s, Py_ssize_t n, int mode, const double[::1] prob,
                      const int64_t[::1] alias, const int64_t[::1] first, const int64_t[::1] second,
                      Py_ssize_t *pi, Py_ssize_t *pj) noexcept nogil:
    cdef Py_ssize_t col = <Py_ssize_t>gs_randbelow(s, prob.shape[0])
    cdef Py_ssize_t d, i
    if gs_random(s) >= prob[col]:
        col = alias[col]
    if mode == MODE_DISTANCE:
        d = second[col]
        i = <Py_ssize_t>gs_randbelow(s, n - d)
        pi[0] = i
        pj[0] = i + d
    else:
        pi[0] = first[col]
        pj[0] = second[col]


def seq_run(int64_t[::1] keys, int mode, const double[::1] prob, const int64_t[::1] alias,
            const int64_t[::1] first, const int64_t[::1] second, double total_weight,
            double fault, uint64_t[::1] state, int64_t steps, int64_t swaps,
            double sim_time, int64_t max_steps,
            int64_t[::1] tr_step=None, int64_t[::1] tr_i=None,
            int64_t[::1] tr_j=None, unsigned char[::1] tr_sw=None,
            double[::1] tr_time=None):
    cdef Py_ssize_t n = keys.shape[0]
    cdef Py_ssize_t cap = 0 if tr_step is None else tr_step.shape[0]
    cdef Py_ssize_t i = 0, j = 0, slot
    cdef int64_t desc = descents(keys)
    cdef int64_t recorded = 0
    cdef bint faulty = fault < 1.0
    cdef bint ok, swapped
    cdef uint64_t s[4]
    for k in range(4):
        s[k] = state[k]
    with nogil:
        while desc != 0 and steps < max_steps:
            sim_time += gs_exponential(s, total_weight)
            draw(s, n, mode, prob, alias, first, second, &i, &j)
            steps += 1
            ok = True
            if faulty:
                ok = gs_random(s) < fault
            swapped = False
            if ok:
                swapped = cmpx(keys, i, j, n, &desc)
                if swapped:
                    swaps += 1
            if cap:
                slot = recorded % cap
                tr_step[slot] = steps
                tr_i[slot] = i
                tr_j[slot] = j
                tr_sw[slot] = swapped
                tr_time[slot] = sim_time
                recorded += 1
    for k in range(4):
        state[k] = s[k]
    return steps, swaps, sim_time, desc == 0, recorded


def par_structured(int64_t[::1] keys, uint64_t[::1] state, int64_t max_rounds,
                   int64_t rounds, int64_t comps, int64_t swaps):
    cdef Py_ssize_t n = keys.shape[0]
    cdef int N = 0
    cdef int64_t desc = descents(keys)
    cdef Py_ssize_t k, lo, hi, d, r, e, base, src, dst
    cdef uint64_t s[4]
    while (1 << (N + 1)) <= n:
        N += 1
    for k in range(4):
        s[k] = state[k]
    with nogil:
        while desc != 0 and rounds < max_rounds:
            k = 1 + <Py_ssize_t>gs_randbelow(s, N)
            lo = n >> (k + 1)
            hi = n >> k
            d = lo + 1 + <Py_ssize_t>gs_randbelow(s, hi - lo)
            r = <Py_ssize_t>gs_randbelow(s, 4)
            rounds += 1
            e = lo if lo > 1 else 1
            base = r * e
            while base < n:
                for src in range(base, base + e):
                    dst = (src + d) % n
                    comps += 1
                    if src < dst:
                        swaps += cmpx(keys, src, dst, n, &desc)
                    else:
                        swaps += cmpx(keys, dst, src, n, &desc)
                base += 4 * e
    for k in range(4):
        state[k] = s[k]
    return rounds, comps, swaps, desc == 0


cdef Py_ssize_t thin_round(uint64_t *s, Py_ssize_t n, Py_ssize_t p, int mode,
                           const double[::1] prob, const int64_t[::1] alias,
                           const int64_t[::1] first, const int64_t[::1] second,
                           Py_ssize_t *pi, Py_ssize_t *pj, int64_t *marks,
                           Py_ssize_t *kept) noexcept nogil:
    """Draw p pairs, keep the unconflicted ones; returns how many were kept."""
    cdef Py_ssize_t w, m = 0
    for w in range(p):
        draw(s, n, mode, prob, alias, first, second, &pi[w], &pj[w])
        marks[pi[w]] += 1
        marks[pj[w]] += 1
    for w in range(p):
        if marks[pi[w]] == 1 and marks[pj[w]] == 1:
            kept[m] = w
            m += 1
    for w in range(p):
        marks[pi[w]] = 0
        marks[pj[w]] = 0
    return m


def par_thinned(int64_t[::1] keys, Py_ssize_t p, int mode, const double[::1] prob,
                const int64_t[::1] alias, const int64_t[::1] first, const int64_t[::1] second,
                uint64_t[::1] state, int64_t max_rounds, int64_t rounds,
                int64_t comps, int64_t proposals, int64_t swaps):
    cdef Py_ssize_t n = keys.shape[0]
    cdef int64_t desc = descents(keys)
    cdef Py_ssize_t m, q, w
    cdef uint64_t s[4]
    cdef Py_ssize_t *pi = <Py_ssize_t *>malloc(p * sizeof(Py_ssize_t))
    cdef Py_ssize_t *pj = <Py_ssize_t *>malloc(p * sizeof(Py_ssize_t))
    cdef Py_ssize_t *kept = <Py_ssize_t *>malloc(p * sizeof(Py_ssize_t))
    cdef int64_t *marks = <int64_t *>calloc(n, sizeof(int64_t))
    for q in range(4):
        s[q] = state[q]
    try:
        with nogil:
            while desc != 0 and rounds < max_rounds:
                m = thin_round(s, n, p, mode, prob, alias, first, second,
                               pi, pj, marks, kept)
                rounds += 1
                proposals += p
                for q in range(m):
                    w = kept[q]
                    comps += 1
                    swaps += cmpx(keys, pi[w], pj[w], n, &desc)
    finally:
        free(pi)
        free(pj)
        free(kept)
        free(marks)
    for q in range(4):
        state[q] = s[q]
    return rounds, comps, proposals, swaps, desc == 0


def thinned_counts(Py_ssize_t n, Py_ssize_t p, int mode, const double[::1] prob,
                   const int64_t[::1] alias, const int64_t[::1] first, const int64_t[::1] second,
                   uint64_t[::1] state, int64_t samples, int64_t[::1] counts):
    cdef int64_t total = 0, t
    cdef Py_ssize_t m, q, w
    cdef uint64_t s[4]
    cdef Py_ssize_t *pi = <Py_ssize_t *>malloc(p * sizeof(Py_ssize_t))
    cdef Py_ssize_t *pj = <Py_ssize_t *>malloc(p * sizeof(Py_ssize_t))
    cdef Py_ssize_t *kept = <Py_ssize_t *>malloc(p * sizeof(Py_ssize_t))
    cdef int64_t *marks = <int64_t *>calloc(n, sizeof(int64_t))
    for q in range(4):
        s[q] = state[q]
    try:
        with nogil:
            for t in range(samples):
                m = thin_round(s, n, p, mode, prob, alias, first, second,
                               pi, pj, marks, kept)
                for q in range(m):
                    w = kept[q]
                    counts[pi[w] * n + pj[w]] += 1
                total += m
    finally:
        free(pi)
        free(pj)
        free(kept)
        free(marks)
    for q in range(4):
        state[q] = s[q]
    return total


def par_dimcut(int64_t[::1] keys, const int64_t[::1] gray, const int64_t[::1] ginv,
               uint64_t[::1] state, int64_t max_rounds, int64_t rounds,
               int64_t comps, int64_t swaps):
    cdef Py_ssize_t n = keys.shape[0]
    cdef int N = 0
    cdef int64_t desc = descents(keys)
    cdef Py_ssize_t bit, i, j, q
    cdef uint64_t s[4]
    while (1 << (N + 1)) <= n:
        N += 1
    for q in range(4):
        s[q] = state[q]
    with nogil:
        while desc != 0 and rounds < max_rounds:
            bit = <Py_ssize_t>gs_randbelow(s, N)
            rounds += 1
            for i in range(n):
                j = ginv[gray[i] ^ (1 << bit)]
                if i < j:
                    comps += 1
                    swaps += cmpx(keys, i, j, n, &desc)
    for q in range(4):
        state[q] = s[q]
    return rounds, comps, swaps, desc == 0


cdef inline void atomic_steps(int64_t[::1] keys, unsigned char *locks, uint64_t *s,
                              int64_t steps, int mode, const double[::1] prob,
                              const int64_t[::1] alias, const int64_t[::1] first,
                              const int64_t[::1] second, double fault, int64_t *comps,
                              int64_t *swaps) noexcept nogil:
    # i and j must stay local: prange does not privatise variables set through pointers
    cdef Py_ssize_t n = keys.shape[0]
    cdef Py_ssize_t i, j
    cdef int64_t c, t
    for c in range(steps):
        draw(s, n, mode, prob, alias, first, second, &i, &j)
        comps[0] += 1
        if fault < 1.0 and not gs_random(s) < fault:
            continue
        gs_lock(&locks[i])
        gs_lock(&locks[j])
        if keys[i] > keys[j]:
            t = keys[i]
            keys[i] = keys[j]
            keys[j] = t
            swaps[0] += 1
        gs_unlock(&locks[j])
        gs_unlock(&locks[i])


def async_atomic(int64_t[::1] keys, Py_ssize_t p, int mode, const double[::1] prob,
                 const int64_t[::1] alias, const int64_t[::1] first, const int64_t[::1] second,
                 double fault, uint64_t[:, ::1] states, int64_t check_every,
                 int64_t max_steps, int64_t[::1] worker_comps,
                 int64_t[::1] worker_swaps, int threads=0):
    cdef Py_ssize_t n = keys.shape[0]
    cdef int64_t chunk = (check_every + p - 1) // p
    cdef int64_t total = 0, epochs = 0, c
    cdef Py_ssize_t w
    cdef bint done = descents(keys) == 0
    cdef unsigned char *locks = <unsigned char *>calloc(n, 1)
    cdef int nt = threads if threads > 0 else 1
    if chunk < 1:
        chunk = 1
    try:
        with nogil:
            while not done:
                for w in prange(p, schedule="static", chunksize=1, num_threads=nt):
                    atomic_steps(keys, locks, &states[w, 0], chunk, mode, prob, alias, first,
                                 second, fault, &worker_comps[w], &worker_swaps[w])
                epochs += 1
                total = 0
                for w in range(p):
                    total = total + worker_comps[w]
                done = descents(keys) == 0 or total >= max_steps
    finally:
        free(locks)
    total = 0
    c = 0
    for w in range(p):
        total += worker_comps[w]
        c += worker_swaps[w]
    return total, c, descents(keys) == 0, epochs


def async_mark(int64_t[::1] keys, Py_ssize_t p, int mode, const double[::1] prob,
               const int64_t[::1] alias, const int64_t[::1] first, const int64_t[::1] second,
               double fault, uint64_t[:, ::1] states, int64_t max_rounds,
               int64_t[::1] worker_comps, int64_t[::1] worker_attempts,
               int threads=0):
    cdef Py_ssize_t n = keys.shape[0]
    cdef int64_t rounds = 0, comps = 0, attempts = 0, swaps = 0, violations = 0
    cdef Py_ssize_t w, i, j
    cdef int64_t prev, t
    cdef int nt = threads if threads > 0 else 1
    cdef bint done = descents(keys) == 0 or max_rounds <= 0
    pi_arr = np.zeros(p, dtype=np.intp)
    pj_arr = np.zeros(p, dtype=np.intp)
    marks_arr = np.zeros(n, dtype=np.int64)
    owner_arr = np.full(n, -1, dtype=np.int64)
    wswaps_arr = np.zeros(p, dtype=np.int64)
    wviol_arr = np.zeros(p, dtype=np.int64)
    cdef Py_ssize_t[::1] pi = pi_arr
    cdef Py_ssize_t[::1] pj = pj_arr
    cdef int64_t[::1] marks = marks_arr
    cdef int64_t[::1] owner = owner_arr
    cdef int64_t[::1] wswaps = wswaps_arr
    cdef int64_t[::1] wviol = wviol_arr
    with nogil:
        while not done:
            for w in prange(p, schedule="static", num_threads=nt):
                draw(&states[w, 0], n, mode, prob, alias, first, second, &pi[w], &pj[w])
                worker_attempts[w] += 1
                gs_fetch_add(&marks[pi[w]], 1)
                gs_fetch_add(&marks[pj[w]], 1)
            for w in prange(p, schedule="static", num_threads=nt):
                i = pi[w]
                j = pj[w]
                if marks[i] == 1 and marks[j] == 1:
                    prev = gs_exchange(&owner[i], w)
                    if prev != -1:
                        wviol[w] += 1
                    prev = gs_exchange(&owner[j], w)
                    if prev != -1:
                        wviol[w] += 1
                    worker_comps[w] += 1
                    if fault >= 1.0 or gs_random(&states[w, 0]) < fault:
                        if keys[i] > keys[j]:
                            t = keys[i]
                            keys[i] = keys[j]
                            keys[j] = t
                            wswaps[w] += 1
            for w in range(p):
                marks[pi[w]] = 0
                marks[pj[w]] = 0
                owner[pi[w]] = -1
                owner[pj[w]] = -1
            rounds += 1
            done = descents(keys) == 0 or rounds >= max_rounds
    for w in range(p):
        comps += worker_comps[w]
        attempts += worker_attempts[w]
        swaps += wswaps[w]
        violations += wviol[w]
    return rounds, comps, attempts, swaps, descents(keys) == 0, violations
