"""Pure numpy implementations of the compiled kernels."""

import numpy as np

OP_NOT, OP_AND, OP_OR, OP_IMP, OP_IFF = -1, -2, -3, -4, -5

# rows are evaluated in blocks to bound memory at 20 variables
_BLOCK_BITS = 16


def first_countermodel(code, nvars):
    code = np.asarray(code, dtype=np.int32)
    rows = 1 << nvars
    block = min(rows, 1 << _BLOCK_BITS)
    for start in range(0, rows, block):
        idx = np.arange(start, start + block, dtype=np.int64)
        stack = []
        for c in code:
            if c >= 0:
                stack.append(((idx >> int(c)) & 1).astype(bool))
            elif c == OP_NOT:
                stack[-1] = ~stack[-1]
            else:
                b = stack.pop()
                a = stack.pop()
                if c == OP_AND:
                    stack.append(a & b)
                elif c == OP_OR:
                    stack.append(a | b)
                elif c == OP_IMP:
                    stack.append(~a | b)
                else:
                    stack.append(a == b)
        bad = np.flatnonzero(~stack[0])
        if bad.size:
            return int(start + bad[0])
    return -1


def bkt_trace(p, observations, p_transit, p_guess, p_slip):
    out = np.empty(len(observations), dtype=np.float64)
    for i, ok in enumerate(observations):
        if ok:
            num = p * (1.0 - p_slip)
            post = num / (num + (1.0 - p) * p_guess)
        else:
            num = p * p_slip
            post = num / (num + (1.0 - p) * (1.0 - p_guess))
        p = post + (1.0 - post) * p_transit
        out[i] = p
    return out


def dominance_counts(xs, ys):
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    lo = np.searchsorted(ys, xs, side="left")
    hi = np.searchsorted(ys, xs, side="right")
    return int(lo.sum()), int((hi - lo).sum())
