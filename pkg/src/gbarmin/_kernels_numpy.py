"""Pure numpy/Python fallback kernels, bit-identical to ``_kernels_numba``.

The generator and window counter are fully vectorized (the recurrence is
resolved by pointer doubling over the copy chains).  The four sequential
predictor state machines cannot be vectorized without changing their
semantics, so they run as plain Python loops here; they are the reason the
numba backend is the default.  Select this backend with
``GBARMIN_BACKEND=numpy``.
"""

import numpy as np


def generate_bits(sel, flip, noise, init, p, burn):
    """Vectorized gbAR recurrence via pointer doubling.

    Each output bit either copies (and possibly flips) an earlier bit or is
    a fresh noise bit; resolving every position therefore means following a
    chain of copy links back to a noise/initial-state root while XOR-ing the
    flips met on the way.  Pointer doubling does that in O(log chain) passes.
    """
    T = sel.shape[0]
    total = p + T
    val = np.zeros(total, dtype=np.uint8)
    val[:p] = init
    ptr = np.arange(total, dtype=np.int64)
    acc = np.zeros(total, dtype=np.uint8)

    is_copy = sel < p
    steps = np.arange(T, dtype=np.int64) + p
    ptr[p:][is_copy] = steps[is_copy] - 1 - sel[is_copy]
    val[p:][~is_copy] = noise[~is_copy]
    acc[p:][is_copy] = flip[sel[is_copy]]

    while True:
        parent = ptr[ptr]
        if np.array_equal(parent, ptr):
            break
        acc ^= acc[ptr]
        ptr = parent
    out = val[ptr] ^ acc
    return out[p + burn:]


def count_windows(bits, width):
    """Histogram of width-bit sliding windows (stride 1, later bit = lower bit)."""
    n = bits.shape[0]
    counts = np.zeros(1 << width, dtype=np.int64)
    if n < width:
        return counts
    n_win = n - width + 1
    values = np.zeros(n_win, dtype=np.int64)
    for j in range(width):
        values += bits[j:j + n_win].astype(np.int64) << (width - 1 - j)
    return np.bincount(values, minlength=1 << width)


def nist_multimcw(bits, windows):
    L = bits.shape[0]
    k = windows.shape[0]
    w1 = int(windows[0])
    if L <= w1:
        return 0, 0, 0
    # prefix sums give each window's ones-count without per-step recounting
    csum = np.concatenate(([0], np.cumsum(bits, dtype=np.int64)))
    ones = [0] * k
    have = [False] * k
    frequent = [0] * k
    scoreboard = [0] * k
    winner = 0
    n_pred = n_correct = run = longest = 0
    for i in range(w1, L):
        for j in range(k):
            wj = int(windows[j])
            if i >= wj:
                have[j] = True
                ones[j] = int(csum[i] - csum[i - wj])
                tw = 2 * ones[j]
                if tw > wj:
                    frequent[j] = 1
                elif tw < wj:
                    frequent[j] = 0
                else:
                    frequent[j] = int(bits[i - 1])
        pred = frequent[winner]
        n_pred += 1
        if pred == bits[i]:
            n_correct += 1
            run += 1
            longest = max(longest, run)
        else:
            run = 0
        for j in range(k):
            if have[j] and frequent[j] == bits[i]:
                scoreboard[j] += 1
                if scoreboard[j] >= scoreboard[winner]:
                    winner = j
    return n_pred, n_correct, longest


def nist_lag(bits, depth):
    L = bits.shape[0]
    if L < 2:
        return 0, 0, 0
    b = bits
    scoreboard = np.zeros(depth, dtype=np.int64)
    winner = 0
    n_pred = n_correct = run = longest = 0
    for i in range(1, L):
        if b[i - 1 - winner] == b[i]:
            n_correct += 1
            run += 1
            longest = max(longest, run)
        else:
            run = 0
        n_pred += 1
        dmax = depth if i >= depth else i
        hits = np.nonzero(b[i - dmax:i][::-1] == b[i])[0]
        for d in hits:
            scoreboard[d] += 1
            if scoreboard[d] >= scoreboard[winner]:
                winner = int(d)
    return n_pred, n_correct, longest


def nist_multimmc(bits, max_order, max_entries):
    L = bits.shape[0]
    if L < 3:
        return 0, 0, 0
    base = np.zeros(max_order + 1, dtype=np.int64)
    total = 0
    for d in range(1, max_order + 1):
        base[d] = total
        total += 1 << d
    counts = np.zeros(2 * total, dtype=np.int64)
    seen = np.zeros(total, dtype=bool)
    entries = [0] * (max_order + 1)
    scoreboard = [0] * max_order
    preds = [-1] * max_order
    winner = 0
    n_pred = n_correct = run = longest = 0
    full_mask = (1 << max_order) - 1
    prev = int(bits[0])
    cur = (int(bits[0]) << 1) | int(bits[1])
    for i in range(2, L):
        sym = int(bits[i - 1])
        for d in range(1, max_order + 1):
            if d > i - 1:
                break
            slot = int(base[d]) + (prev & ((1 << d) - 1))
            if seen[slot]:
                counts[2 * slot + sym] += 1
            elif entries[d] < max_entries:
                seen[slot] = True
                entries[d] += 1
                counts[2 * slot + sym] += 1
        for d in range(max_order):
            preds[d] = -1
        for d in range(1, max_order + 1):
            if d > i:
                break
            slot = int(base[d]) + (cur & ((1 << d) - 1))
            if seen[slot]:
                preds[d - 1] = 1 if counts[2 * slot + 1] > counts[2 * slot] else 0
        x = int(bits[i])
        n_pred += 1
        if preds[winner] == x:
            n_correct += 1
            run += 1
            longest = max(longest, run)
        else:
            run = 0
        for d in range(max_order):
            if preds[d] == x:
                scoreboard[d] += 1
                if scoreboard[d] >= scoreboard[winner]:
                    winner = d
        prev = cur
        cur = ((cur << 1) | x) & full_mask
    return n_pred, n_correct, longest


def nist_lz78y(bits, depth, max_entries):
    L = bits.shape[0]
    if L < depth + 2:
        return 0, 0, 0
    base = np.zeros(depth + 1, dtype=np.int64)
    total = 0
    for j in range(1, depth + 1):
        base[j] = total
        total += 1 << j
    counts = np.zeros(2 * total, dtype=np.int64)
    seen = np.zeros(total, dtype=bool)
    dict_size = 0
    n_pred = n_correct = run = longest = 0
    full_mask = (1 << depth) - 1
    prev = 0
    for t in range(depth):
        prev = (prev << 1) | int(bits[t])
    cur = ((prev << 1) | int(bits[depth])) & full_mask
    for i in range(depth + 1, L):
        sym = int(bits[i - 1])
        for j in range(depth, 0, -1):
            slot = int(base[j]) + (prev & ((1 << j) - 1))
            if seen[slot]:
                counts[2 * slot + sym] += 1
            elif dict_size < max_entries:
                seen[slot] = True
                dict_size += 1
                counts[2 * slot + sym] += 1
        maxcount = 0
        pred = -1
        for j in range(depth, 0, -1):
            slot = int(base[j]) + (cur & ((1 << j) - 1))
            if seen[slot]:
                c0 = counts[2 * slot]
                c1 = counts[2 * slot + 1]
                y, cy = (1, c1) if c1 > c0 else (0, c0)
                if cy > maxcount:
                    maxcount = cy
                    pred = y
        x = int(bits[i])
        n_pred += 1
        if pred == x:
            n_correct += 1
            run += 1
            longest = max(longest, run)
        else:
            run = 0
        prev = cur
        cur = ((cur << 1) | x) & full_mask
    return n_pred, n_correct, longest
