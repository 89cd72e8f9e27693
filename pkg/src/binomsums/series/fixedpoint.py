"""Binary fixed-point head sums.

The direct part of every evaluation is a loop over k = 1..2*K0 with a handful
of big-int operations per step.  Values are integers scaled by 2^bits; every
floor division loses at most one unit, so a run of K steps is off by at most
a few K units per term and ~K^2 units overall, which the caller absorbs by
asking for ~2 log2(K) + 16 spare bits.
"""

from __future__ import annotations

import math

from .kernels import Kernel


def spare_bits(K: int) -> int:
    return 2 * max(1, K).bit_length() + 16


def head_sums(kernel: Kernel, checkpoints: list[int], bits: int) -> list[int]:
    """Fixed-point values of sum_{k=1..K} term(k)/scale for each K in checkpoints.

    The kernel's rational ``scale`` is not applied.
    """
    Kmax = max(checkpoints)
    wanted = set(checkpoints)
    out = {0: 0} if 0 in wanted else {}
    one = 1 << bits

    central = kernel.central
    use_H = any(name == "H" for name, _ in kernel.harmonics)
    use_h = any(name == "h" for name, _ in kernel.harmonics)
    use_H2 = any(name == "H2" for name, _ in kernel.harmonics)
    harm = kernel.harmonics
    # split linear factors into a combined divisor and multiplier per k
    dividers = [(u, v, -e) for u, v, e in kernel.linear if e < 0]
    multipliers = [(u, v, e) for u, v, e in kernel.linear if e > 0]
    alternating = kernel.alternating

    c = one
    H = h = H2 = 0
    total = 0
    for k in range(1, Kmax + 1):
        if central:
            c = c * (2 * k - 1) // (2 * k)
        if use_H:
            H += one // k
        if use_h or use_H2:
            inv_odd = one // (2 * k - 1)
            h += inv_odd
            if use_H2:
                H2 += inv_odd + one // (2 * k)
        t = c if central else one
        for name, p in harm:
            x = H if name == "H" else h if name == "h" else H2
            for _ in range(p):
                t = (t * x) >> bits
        if multipliers:
            t *= math.prod((u * k + v) ** e for u, v, e in multipliers)
        if dividers:
            t //= math.prod((u * k + v) ** e for u, v, e in dividers)
        if alternating and not k & 1:
            total -= t
        else:
            total += t
        if k in wanted:
            out[k] = total
    return [out[K] for K in checkpoints]
