"""Independent evaluation of the bound formulas.

Run with `python3 bounds_oracle.py`; the printed values are frozen into
`tests/bounds_values.rs`. Uses mpmath at 60 digits and exact integers.
"""
from fractions import Fraction
from itertools import product
from math import comb, factorial

import mpmath

mpmath.mp.dps = 60
E2 = mpmath.e ** 2
E4 = mpmath.e ** 4


def multinomial(parts):
    out = factorial(sum(parts))
    for p in parts:
        out //= factorial(p)
    return out


def khovanskii(n, l):
    return 2 ** comb(l + n, 2) * (n + 1) ** (l + n)


def bs07(n, l):
    return (E2 + 3) / 4 * 2 ** comb(l, 2) * n ** l


def bbs(n, l):
    return (E4 + 3) / 4 * 2 ** comb(l, 2) * n ** l


def mixed(blocks, e):
    l = sum(blocks)
    return (e + 3) / 4 * 2 ** comb(l, 2) * multinomial(blocks)


def a_k(blocks, k):
    l = sum(blocks)
    total = 0
    for js in product(*[range(b + 1) for b in blocks]):
        if sum(js) != l - k:
            continue
        term = multinomial(js)
        for b, j in zip(blocks, js):
            term *= comb(b + 2, j + 2)
        total += term
    return 2 ** comb(l - k, 2) * total


def compositions(l, n):
    if n == 1:
        yield (l,)
        return
    for first in range(1, l - n + 2):
        for rest in compositions(l - first, n - 1):
            yield (first,) + rest


if __name__ == "__main__":
    import math
    print("khovanskii(1,1)", khovanskii(1, 1))
    print("khovanskii(2,2)", khovanskii(2, 2))
    print("khovanskii(1,0)", khovanskii(1, 0))
    for name, v in [
        ("bs07(2,2)", bs07(2, 2)),
        ("bbs(2,2)", bbs(2, 2)),
        ("bs07(1,1)", bs07(1, 1)),
        ("mixed_pos[1,1]", mixed([1, 1], E2)),
        ("mixed_real[1,1]", mixed([1, 1], E4)),
        ("mixed_pos[1,1,1]", mixed([1, 1, 1], E2)),
        ("mixed_pos[2,1]", mixed([2, 1], E2)),
    ]:
        print(name, mpmath.nstr(v, 20), int(mpmath.floor(v)))
    print("multinomial(10;3,3,4)", multinomial([3, 3, 4]))
    for k in range(3):
        print("a_%d[1,1]" % k, a_k([1, 1], k))
    print("bracket full [1,1]", sum(2 ** k * a_k([1, 1], k) for k in range(1, 3)))
    print("bracket chamber [1,1]", sum(a_k([1, 1], k) for k in range(1, 3)))
    # inequality survey
    fails = []
    for l in range(3, 10):
        for n in range(2, l + 1):
            for blocks in compositions(l, n):
                a0 = a_k(blocks, 0)
                full = sum(2 ** k * a_k(blocks, k) for k in range(1, l + 1))
                cham = sum(a_k(blocks, k) for k in range(1, l + 1))
                if not full < (E4 - 1) / 2 * a0:
                    fails.append(("real", blocks, float(full / a0)))
                if not cham < (E2 - 1) / 2 * a0:
                    fails.append(("chamber", blocks, float(cham / a0)))
                if l >= 5:
                    for k in range(1, l + 1):
                        if Fraction(a_k(blocks, k)) > Fraction(2 ** (k - 1), factorial(k)) * a0:
                            fails.append(("intbound", blocks, k))
    print("inequality failures:", fails[:40], len(fails))
