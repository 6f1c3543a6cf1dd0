"""Pure-Python hot loops, used when the compiled core is unavailable.

Every function here has a twin of the same name and signature in ``_core.pyx``.
Both consume their random streams in the same order, so for a given seed the
two backends return identical results (the atomic executor excepted for p > 1,
where thread interleaving is inherently nondeterministic).

Conventions shared with the compiled core:

* ``keys`` is a 1-d ``int64`` array, mutated in place.
* ``state`` is a ``uint64`` array of length 4 (or shape ``(p, 4)`` for
  per-worker streams), mutated in place.
* a sampler is passed as ``(mode, prob, alias, first, second)``.
"""

import threading

from .rng import Stream

MODE_DISTANCE = 0


def _load(state):
    return Stream.from_state(state)


def _store(stream, state):
    for k in range(4):
        state[k] = stream.s[k]


def _descents(a):
    return sum(1 for k in range(len(a) - 1) if a[k] > a[k + 1])


def _draw(rng, n, mode, prob, alias, first, second):
    col = rng.randbelow(len(prob))
    if rng.random() >= prob[col]:
        col = alias[col]
    if mode == MODE_DISTANCE:
        d = second[col]
        i = rng.randbelow(n - d)
        return i, i + d
    return first[col], second[col]


def _local_desc(a, i, j, n):
    """Descents touching positions ``i`` or ``j`` (i < j)."""
    c = 0
    for k in ((i - 1, i, j) if j - 1 == i else (i - 1, i, j - 1, j)):
        if 0 <= k < n - 1 and a[k] > a[k + 1]:
            c += 1
    return c


def _cmpx(a, i, j, n, desc):
    """Compare-exchange positions i < j; returns (swapped, new descent count)."""
    if a[i] <= a[j]:
        return False, desc
    desc -= _local_desc(a, i, j, n)
    a[i], a[j] = a[j], a[i]
    desc += _local_desc(a, i, j, n)
    return True, desc


def seq_run(keys, mode, prob, alias, first, second, total_weight, fault,
            state, steps, swaps, sim_time, max_steps,
            tr_step, tr_i, tr_j, tr_sw, tr_time):
    """Run the single-pair dynamics until sorted or ``max_steps`` total steps.

    ``fault`` is a success probability (1.0 disables faults) or, in this
    backend only, a callable ``(i, j) -> probability``.
    Returns ``(steps, swaps, sim_time, sorted, trace_count)``.
    """
    a = [int(v) for v in keys]
    n = len(a)
    rng = _load(state)
    prob = prob.tolist()
    alias = alias.tolist()
    first = first.tolist()
    second = second.tolist()
    cap = 0 if tr_step is None else len(tr_step)
    per_pair = callable(fault)
    faulty = per_pair or fault < 1.0
    desc = _descents(a)
    recorded = 0
    while desc and steps < max_steps:
        sim_time += rng.exponential(total_weight)
        i, j = _draw(rng, n, mode, prob, alias, first, second)
        steps += 1
        ok = True
        if faulty:
            p = fault(i, j) if per_pair else fault
            ok = rng.random() < p
        swapped = False
        if ok:
            swapped, desc = _cmpx(a, i, j, n, desc)
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
    keys[:] = a
    _store(rng, state)
    return steps, swaps, sim_time, desc == 0, recorded


def _structured_round(rng, n, N):
    k = 1 + rng.randbelow(N)
    lo = n >> (k + 1)
    hi = n >> k
    d = lo + 1 + rng.randbelow(hi - lo)
    r = rng.randbelow(4)
    return k, d, r


def structured_pairs(n, k, d, r):
    """Pairs of the structured matching for outcome ``(k, d, r)``.

    Each block holds ``e = max(1, n / 2^(k+1))`` edges; blocks sit ``4e``
    apart and the whole matching is rotated by ``r * e``.
    """
    e = max(1, n >> (k + 1))
    out = []
    for base in range(r * e, n, 4 * e):
        for s in range(base, base + e):
            t = (s + d) % n
            out.append((s, t) if s < t else (t, s))
    return out


def par_structured(keys, state, max_rounds, rounds, comps, swaps):
    a = [int(v) for v in keys]
    n = len(a)
    N = n.bit_length() - 1
    rng = _load(state)
    desc = _descents(a)
    while desc and rounds < max_rounds:
        k, d, r = _structured_round(rng, n, N)
        rounds += 1
        for i, j in structured_pairs(n, k, d, r):
            comps += 1
            sw, desc = _cmpx(a, i, j, n, desc)
            swaps += sw
    keys[:] = a
    _store(rng, state)
    return rounds, comps, swaps, desc == 0


def _thinned_draws(rng, n, p, sam):
    """Draw ``p`` pairs and keep those whose endpoints nobody else marked."""
    props = [_draw(rng, n, *sam) for _ in range(p)]
    marks = {}
    for i, j in props:
        marks[i] = marks.get(i, 0) + 1
        marks[j] = marks.get(j, 0) + 1
    kept = [(i, j) for i, j in props if marks[i] == 1 and marks[j] == 1]
    return props, kept


def _plain(sam):
    mode, prob, alias, first, second = sam
    return mode, prob.tolist(), alias.tolist(), first.tolist(), second.tolist()


def par_thinned(keys, p, mode, prob, alias, first, second, state, max_rounds,
                rounds, comps, proposals, swaps):
    a = [int(v) for v in keys]
    n = len(a)
    sam = _plain((mode, prob, alias, first, second))
    rng = _load(state)
    desc = _descents(a)
    while desc and rounds < max_rounds:
        _, kept = _thinned_draws(rng, n, p, sam)
        rounds += 1
        proposals += p
        for i, j in kept:
            comps += 1
            sw, desc = _cmpx(a, i, j, n, desc)
            swaps += sw
    keys[:] = a
    _store(rng, state)
    return rounds, comps, proposals, swaps, desc == 0


def thinned_counts(n, p, mode, prob, alias, first, second, state, samples, counts):
    """Accumulate into ``counts[i * n + j]`` how often ``{i, j}`` is retained."""
    sam = _plain((mode, prob, alias, first, second))
    rng = _load(state)
    total = 0
    for _ in range(samples):
        _, kept = _thinned_draws(rng, n, p, sam)
        for i, j in kept:
            counts[i * n + j] += 1
        total += len(kept)
    _store(rng, state)
    return total


def dimcut_pairs(gray, ginv, bit):
    out = []
    for i in range(len(gray)):
        j = ginv[gray[i] ^ (1 << bit)]
        if i < j:
            out.append((i, j))
    return out


def par_dimcut(keys, gray, ginv, state, max_rounds, rounds, comps, swaps):
    a = [int(v) for v in keys]
    n = len(a)
    N = n.bit_length() - 1
    gray = gray.tolist()
    ginv = ginv.tolist()
    rng = _load(state)
    desc = _descents(a)
    while desc and rounds < max_rounds:
        bit = rng.randbelow(N)
        rounds += 1
        for i, j in dimcut_pairs(gray, ginv, bit):
            comps += 1
            sw, desc = _cmpx(a, i, j, n, desc)
            swaps += sw
    keys[:] = a
    _store(rng, state)
    return rounds, comps, swaps, desc == 0


def async_atomic(keys, p, mode, prob, alias, first, second, fault, states,
                 check_every, max_steps, worker_comps, worker_swaps, threads=0):
    """Run ``p`` threads that each lock two positions (lower index first),
    compare-exchange, and release.

    Workers stop at a barrier after every ``ceil(check_every / p)`` steps of
    their own; the barrier action checks sortedness while all workers are
    quiescent. Returns ``(comparisons, swaps, sorted, epochs)``.
    """
    n = len(keys)
    a = [int(v) for v in keys]
    sam = _plain((mode, prob, alias, first, second))
    locks = [threading.Lock() for _ in range(n)]
    chunk = max(1, -(-check_every // p))
    streams = [_load(states[w]) for w in range(p)]
    comps = [0] * p
    swaps = [0] * p
    status = {"stop": _descents(a) == 0, "epochs": 0}

    def at_quiescence():
        status["epochs"] += 1
        if _descents(a) == 0 or sum(comps) >= max_steps:
            status["stop"] = True

    barrier = threading.Barrier(p, action=at_quiescence)

    def worker(w):
        rng = streams[w]
        while not status["stop"]:
            for _ in range(chunk):
                i, j = _draw(rng, n, *sam)
                comps[w] += 1
                if fault < 1.0 and not rng.random() < fault:
                    continue
                with locks[i], locks[j]:
                    if a[i] > a[j]:
                        a[i], a[j] = a[j], a[i]
                        swaps[w] += 1
            barrier.wait()

    threads = [threading.Thread(target=worker, args=(w,)) for w in range(p)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    keys[:] = a
    for w in range(p):
        _store(streams[w], states[w])
        worker_comps[w] = comps[w]
        worker_swaps[w] = swaps[w]
    return sum(comps), sum(swaps), _descents(a) == 0, status["epochs"]


def async_mark(keys, p, mode, prob, alias, first, second, fault, states,
               max_rounds, worker_comps, worker_attempts, threads=0):
    """Two-phase mark protocol, one thread per worker, barrier-synchronised.

    Phase 1: every worker draws a pair and marks both endpoints.
    Phase 2: a worker whose endpoints carry only its own mark sorts the pair.
    Returns ``(rounds, comparisons, attempts, swaps, sorted, violations)``.
    """
    n = len(keys)
    a = [int(v) for v in keys]
    sam = _plain((mode, prob, alias, first, second))
    streams = [_load(states[w]) for w in range(p)]
    marks = [0] * n
    owner = [-1] * n
    mark_lock = threading.Lock()
    comps = [0] * p
    attempts = [0] * p
    props = [None] * p
    status = {"stop": _descents(a) == 0, "rounds": 0, "swaps": 0, "violations": 0}
    if status["stop"] or max_rounds <= 0:
        status["stop"] = True

    def end_round():
        status["rounds"] += 1
        for i in range(n):
            marks[i] = 0
            owner[i] = -1
        if _descents(a) == 0 or status["rounds"] >= max_rounds:
            status["stop"] = True

    barrier = threading.Barrier(p)
    closing = threading.Barrier(p, action=end_round)

    def worker(w):
        rng = streams[w]
        while not status["stop"]:
            i, j = _draw(rng, n, *sam)
            props[w] = (i, j)
            attempts[w] += 1
            with mark_lock:
                marks[i] += 1
                marks[j] += 1
            barrier.wait()
            if marks[i] == 1 and marks[j] == 1:
                with mark_lock:
                    for v in (i, j):
                        if owner[v] != -1:
                            status["violations"] += 1
                        owner[v] = w
                comps[w] += 1
                if fault >= 1.0 or rng.random() < fault:
                    if a[i] > a[j]:
                        a[i], a[j] = a[j], a[i]
                        with mark_lock:
                            status["swaps"] += 1
            closing.wait()

    threads = [threading.Thread(target=worker, args=(w,)) for w in range(p)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    keys[:] = a
    for w in range(p):
        _store(streams[w], states[w])
        worker_comps[w] = comps[w]
        worker_attempts[w] = attempts[w]
    return (status["rounds"], sum(comps), sum(attempts), status["swaps"],
            _descents(a) == 0, status["violations"])
