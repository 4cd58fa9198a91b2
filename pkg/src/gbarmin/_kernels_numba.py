"""Numba-compiled hot kernels.

Every function here has a drop-in twin in ``_kernels_numpy``; the two must
produce bit-identical results for the same inputs.  All randomness is drawn
by the callers and passed in as arrays so backend choice never changes the
output stream.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def generate_bits(sel, flip, noise, init, p, burn):
    """Run the gbAR recurrence over precomputed draws.

    sel[t] in [0, p) selects a lag (copy, XOR-flipped when flip[sel] is 1);
    sel[t] == p takes the fresh noise bit.  The first ``p`` slots of the
    working buffer hold the initial state; ``burn`` leading outputs are
    discarded.
    """
    T = sel.shape[0]
    buf = np.empty(p + T, dtype=np.uint8)
    for j in range(p):
        buf[j] = init[j]
    for t in range(T):
        s = sel[t]
        a = p + t
        if s < p:
            buf[a] = buf[a - 1 - s] ^ flip[s]
        else:
            buf[a] = noise[t]
    return buf[p + burn:].copy()


@njit(cache=True)
def count_windows(bits, width):
    """Histogram of width-bit sliding windows (stride 1, later bit = lower bit)."""
    n = bits.shape[0]
    counts = np.zeros(1 << width, dtype=np.int64)
    if n < width:
        return counts
    mask = (1 << width) - 1
    value = 0
    for j in range(width):
        value = (value << 1) | bits[j]
    counts[value] += 1
    for t in range(width, n):
        value = ((value << 1) | bits[t]) & mask
        counts[value] += 1
    return counts


@njit(cache=True)
def nist_multimcw(bits, windows):
    """Most-common-in-window predictor with a scoreboard over window sizes.

    Returns (number of predictions, correct count, longest correct run).
    """
    L = bits.shape[0]
    k = windows.shape[0]
    w1 = windows[0]
    if L <= w1:
        return 0, 0, 0
    ones = np.zeros(k, dtype=np.int64)
    have = np.zeros(k, dtype=np.uint8)
    scoreboard = np.zeros(k, dtype=np.int64)
    frequent = np.zeros(k, dtype=np.int64)
    winner = 0
    n_pred = 0
    n_correct = 0
    run = 0
    longest = 0
    for i in range(w1, L):
        for j in range(k):
            wj = windows[j]
            if i == wj:
                s = 0
                for t in range(wj):
                    s += bits[t]
                ones[j] = s
                have[j] = 1
            elif i > wj:
                ones[j] += bits[i - 1] - bits[i - 1 - wj]
            if have[j] == 1:
                tw = 2 * ones[j]
                if tw > wj:
                    frequent[j] = 1
                elif tw < wj:
                    frequent[j] = 0
                else:
                    frequent[j] = bits[i - 1]  # tie: most recent value
        pred = frequent[winner]
        n_pred += 1
        if pred == bits[i]:
            n_correct += 1
            run += 1
            if run > longest:
                longest = run
        else:
            run = 0
        for j in range(k):
            if have[j] == 1 and frequent[j] == bits[i]:
                scoreboard[j] += 1
                if scoreboard[j] >= scoreboard[winner]:
                    winner = j
    return n_pred, n_correct, longest


@njit(cache=True)
def nist_lag(bits, depth):
    """Lag predictor: subpredictor d repeats bits[i-d]; scoreboard picks d."""
    L = bits.shape[0]
    if L < 2:
        return 0, 0, 0
    scoreboard = np.zeros(depth, dtype=np.int64)
    winner = 0
    n_pred = 0
    n_correct = 0
    run = 0
    longest = 0
    for i in range(1, L):
        pred = bits[i - 1 - winner]
        n_pred += 1
        if pred == bits[i]:
            n_correct += 1
            run += 1
            if run > longest:
                longest = run
        else:
            run = 0
        dmax = depth if i >= depth else i
        for d in range(dmax):
            if bits[i - 1 - d] == bits[i]:
                scoreboard[d] += 1
                if scoreboard[d] >= scoreboard[winner]:
                    winner = d
    return n_pred, n_correct, longest


@njit(cache=True)
def nist_multimmc(bits, max_order, max_entries):
    """Markov-model-with-counting predictor over orders 1..max_order."""
    L = bits.shape[0]
    if L < 3:
        return 0, 0, 0
    # flat per-order tables: order d occupies 2^d contexts starting at base[d]
    base = np.zeros(max_order + 1, dtype=np.int64)
    total = 0
    for d in range(1, max_order + 1):
        base[d] = total
        total += 1 << d
    counts = np.zeros(2 * total, dtype=np.int64)
    seen = np.zeros(total, dtype=np.uint8)
    entries = np.zeros(max_order + 1, dtype=np.int64)
    scoreboard = np.zeros(max_order, dtype=np.int64)
    preds = np.zeros(max_order, dtype=np.int64)
    winner = 0
    n_pred = 0
    n_correct = 0
    run = 0
    longest = 0
    full_mask = (1 << max_order) - 1
    prev = np.int64(bits[0])                        # window ending at i-2
    cur = np.int64((bits[0] << 1) | bits[1])        # window ending at i-1
    for i in range(2, L):
        # train: context of order d ending at i-2, symbol bits[i-1]
        sym = bits[i - 1]
        for d in range(1, max_order + 1):
            if d > i - 1:
                break
            ctx = prev & ((1 << d) - 1)
            slot = base[d] + ctx
            if seen[slot] == 1:
                counts[2 * slot + sym] += 1
            elif entries[d] < max_entries:
                seen[slot] = 1
                entries[d] += 1
                counts[2 * slot + sym] += 1
        # predict bits[i] from context ending at i-1
        for d in range(max_order):
            preds[d] = -1
        for d in range(1, max_order + 1):
            if d > i:
                break
            ctx = cur & ((1 << d) - 1)
            slot = base[d] + ctx
            if seen[slot] == 1:
                c0 = counts[2 * slot]
                c1 = counts[2 * slot + 1]
                preds[d - 1] = 1 if c1 > c0 else 0
        pred = preds[winner]
        n_pred += 1
        if pred == bits[i]:
            n_correct += 1
            run += 1
            if run > longest:
                longest = run
        else:
            run = 0
        for d in range(max_order):
            if preds[d] == bits[i]:
                scoreboard[d] += 1
                if scoreboard[d] >= scoreboard[winner]:
                    winner = d
        prev = cur
        cur = ((cur << 1) | bits[i]) & full_mask
    return n_pred, n_correct, longest


@njit(cache=True)
def nist_lz78y(bits, depth, max_entries):
    """LZ78-style predictor: counts over variable-depth contexts, shared cap."""
    L = bits.shape[0]
    if L < depth + 2:
        return 0, 0, 0
    base = np.zeros(depth + 1, dtype=np.int64)
    total = 0
    for j in range(1, depth + 1):
        base[j] = total
        total += 1 << j
    counts = np.zeros(2 * total, dtype=np.int64)
    seen = np.zeros(total, dtype=np.uint8)
    dict_size = 0
    n_pred = 0
    n_correct = 0
    run = 0
    longest = 0
    full_mask = (1 << depth) - 1
    # windows ending at i-2 (prev) and i-1 (cur), most recent lowest
    prev = np.int64(0)
    for t in range(depth):
        prev = (prev << 1) | bits[t]
    cur = ((prev << 1) | bits[depth]) & full_mask
    for i in range(depth + 1, L):
        sym = bits[i - 1]
        for j in range(depth, 0, -1):
            ctx = prev & ((1 << j) - 1)
            slot = base[j] + ctx
            if seen[slot] == 1:
                counts[2 * slot + sym] += 1
            elif dict_size < max_entries:
                seen[slot] = 1
                dict_size += 1
                counts[2 * slot + sym] += 1
        maxcount = 0
        pred = -1
        for j in range(depth, 0, -1):
            ctx = cur & ((1 << j) - 1)
            slot = base[j] + ctx
            if seen[slot] == 1:
                c0 = counts[2 * slot]
                c1 = counts[2 * slot + 1]
                if c1 > c0:
                    y = 1
                    cy = c1
                else:
                    y = 0
                    cy = c0
                if cy > maxcount:
                    maxcount = cy
                    pred = y
        n_pred += 1
        if pred == bits[i]:
            n_correct += 1
            run += 1
            if run > longest:
                longest = run
        else:
            run = 0
        prev = cur
        cur = ((cur << 1) | bits[i]) & full_mask
    return n_pred, n_correct, longest
