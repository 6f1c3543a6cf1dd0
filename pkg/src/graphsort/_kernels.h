/* xoshiro256** and spin-lock helpers for the compiled core.
 * Must stay draw-for-draw identical to graphsort/rng.py. */
#ifndef GRAPHSORT_KERNELS_H
#define GRAPHSORT_KERNELS_H

#include <stdint.h>
#include <math.h>
#include <sched.h>

static inline uint64_t gs_rotl(uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

static inline uint64_t gs_next(uint64_t *s) {
    uint64_t result = gs_rotl(s[1] * 5, 7) * 9;
    uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = gs_rotl(s[3], 45);
    return result;
}

static inline double gs_random(uint64_t *s) {
    return (double)(gs_next(s) >> 11) * (1.0 / 9007199254740992.0);
}

static inline uint64_t gs_randbelow(uint64_t *s, uint64_t m) {
    uint64_t x = gs_next(s);
    unsigned __int128 prod = (unsigned __int128)x * m;
    uint64_t low = (uint64_t)prod;
    if (low < m) {
        uint64_t threshold = (0 - m) % m;
        while (low < threshold) {
            x = gs_next(s);
            prod = (unsigned __int128)x * m;
            low = (uint64_t)prod;
        }
    }
    return (uint64_t)(prod >> 64);
}

static inline double gs_exponential(uint64_t *s, double rate) {
    return -log(1.0 - gs_random(s)) / rate;
}

static inline void gs_lock(volatile unsigned char *l) {
    while (__atomic_test_and_set((void *)l, __ATOMIC_ACQUIRE)) {
        int spins = 0;
        while (__atomic_load_n(l, __ATOMIC_RELAXED)) {
            /* holder may be descheduled when threads outnumber cores */
            if (++spins > 256) {
                sched_yield();
                spins = 0;
            }
        }
    }
}

static inline void gs_unlock(volatile unsigned char *l) {
    __atomic_clear((void *)l, __ATOMIC_RELEASE);
}

static inline int64_t gs_fetch_add(int64_t *p, int64_t v) {
    return __atomic_fetch_add(p, v, __ATOMIC_ACQ_REL);
}

static inline int64_t gs_exchange(int64_t *p, int64_t v) {
    return __atomic_exchange_n(p, v, __ATOMIC_ACQ_REL);
}

#endif
