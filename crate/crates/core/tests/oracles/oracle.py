"""Independent brute-force oracle for the frozen regression constants.

Run with `python3 oracle.py`; every constant asserted in the Rust tests
under a `frozen` name was produced by this script. Nothing here imports
or shells out to the Rust implementation.
"""
import cmath
import math

import mpmath
import numpy as np
from sympy import primerange, primitive_root

mpmath.mp.dps = 30


def raw_bump(t, lo, hi):
    if t <= lo or t >= hi:
        return 0.0
    return math.exp(-1.0 / ((t - lo) * (hi - t)))


OMEGA_MASS = mpmath.quad(lambda t: mpmath.exp(-1 / ((t - 0.5) * (1 - t))), [0.5, 0.75, 1])
C_OMEGA = float(1 / OMEGA_MASS)


def omega(t):
    return C_OMEGA * raw_bump(t, 0.5, 1.0)


def weight_w(t):
    if t <= 1.0 or t >= 2.0:
        return 0.0
    return math.exp(4.0 - 1.0 / ((t - 1.0) * (2.0 - t)))


def c_q(q):
    s = sum(omega(r / q) for r in range(1, int(q) + 1))
    return q / s


def h(x, y):
    ay = abs(y)
    total = 0.0
    for j in range(1, int(math.floor(1.0 / x)) + 2):
        total += omega(x * j) / (x * j)
    if ay > 0:
        for j in range(1, int(math.floor(2 * ay / x)) + 2):
            total -= omega(ay / (x * j)) / (x * j)
    return total


def characters(p):
    g = primitive_root(p)
    dlog = {}
    v = 1
    for t in range(p - 1):
        dlog[v] = t
        v = v * g % p
    return g, dlog


def chi_table(p, k):
    g, dlog = characters(p)
    tab = np.zeros(p, dtype=complex)
    for a in range(1, p):
        tab[a] = cmath.exp(2j * math.pi * k * dlog[a] / (p - 1))
    return tab


def deligne_ratio(p):
    best = 0.0
    x = np.arange(1, p)
    for k in range(1, p - 1):
        tab = chi_table(p, k)
        for m in range(1, p):
            for n in range(1, p):
                s = np.sum(tab[x] * np.conj(tab[(m + x) % p]) * np.exp(2j * np.pi * n * x / p))
                best = max(best, abs(s) / math.sqrt(p))
    return best


def s_chi(primes, ks, big_n):
    tabs = [chi_table(p, k) for p, k in zip(primes, ks)]
    total = 0j
    for n in range(int(math.floor(big_n)), int(math.ceil(2 * big_n)) + 1):
        w = weight_w(n / big_n)
        if w == 0.0:
            continue
        v = 1 + 0j
        for p, tab in zip(primes, tabs):
            v *= tab[n % p]
        total += v * w
    return total


def bound(m1, m2, m3, big_n):
    return math.sqrt(m2 * m3) + m1 ** 0.25 * m2 ** 0.5 * big_n ** 0.25 + m3 ** 0.5 * big_n ** 0.75


def sweep_max_ratio():
    small = list(primerange(3, 51))
    mid = list(primerange(3, 201))
    best = (0.0, None)
    for m1 in small:
        for m3 in small:
            if m3 == m1:
                continue
            for m2 in mid:
                if m2 in (m1, m3):
                    continue
                lo = m1
                hi = m1 * min(m2 ** (2.0 / 3.0), m3 ** 2)
                ks = ((m1 - 1) // 2, (m2 - 1) // 2, (m3 - 1) // 2)
                for i in range(3):
                    big_n = lo * (hi / lo) ** (i / 2.0)
                    s = s_chi((m1, m2, m3), ks, big_n)
                    r = abs(s) / bound(m1, m2, m3, big_n)
                    if r > best[0]:
                        best = (r, (m1, m2, m3, big_n))
    return best


def l_half(primes, ks):
    m = 1
    for p in primes:
        m *= p
    tabs = [chi_table(p, k) for p, k in zip(primes, ks)]
    total = mpmath.mpc(0)
    for a in range(1, m + 1):
        v = 1 + 0j
        for p, tab in zip(primes, tabs):
            v *= tab[a % p]
        if v == 0:
            continue
        total += mpmath.mpc(v) * mpmath.zeta(0.5, mpmath.mpf(a) / m)
    return complex(total / mpmath.sqrt(m))

def dyadic_aggregate(primes, ks, tail_exponent):
    from scipy.integrate import quad

    lo, hi = math.sqrt(2.0), 2.0
    mass = quad(lambda u: raw_bump(u, lo, hi), lo, hi, epsabs=1e-15, epsrel=1e-14)[0]

    def big_psi(t):
        if t <= lo:
            return 1.0
        if t >= hi:
            return 0.0
        return 1.0 - quad(lambda u: raw_bump(u, lo, hi), lo, t, epsabs=1e-15, epsrel=1e-14)[0] / mass

    m = 1
    for p in primes:
        m *= p
    tabs = [chi_table(p, k) for p, k in zip(primes, ks)]
    top = math.sqrt(m) * (10 * math.log(m)) ** 2
    total = 0.0
    nu = -1
    while 2 ** (nu / 2) <= top:
        big_n = 2 ** (nu / 2)
        s = 0j
        for n in range(max(1, math.ceil(big_n)), math.floor(2 * big_n) + 1):
            w = big_psi(n / big_n) - big_psi(math.sqrt(2) * n / big_n)
            if w == 0.0:
                continue
            v = 1 + 0j
            for p, tab in zip(primes, tabs):
                v *= tab[n % p]
            s += v * w
        total += abs(s) / math.sqrt(big_n) * (1 + big_n / math.sqrt(m)) ** (-tail_exponent)
        nu += 1
    return total


if __name__ == "__main__":
    print("c_omega", repr(C_OMEGA))
    for q in (5.0, 10.0, 20.0, 31.62, 40.0, 80.0, 160.0):
        c = c_q(q)
        print("c_Q", q, repr(c), "|c_Q-1|", abs(c - 1), "Q^-3", q ** -3)
    grid = 0.0
    for i in range(1, 101):
        x = i / 100
        for j in range(-100, 101):
            grid = max(grid, x * abs(h(x, j / 50)))
    print("C_h max x|h| on grid", repr(grid))
    print("deligne_ratio(3)", repr(deligne_ratio(3)))
    print("deligne_ratio(29)", repr(deligne_ratio(29)))
    cstar = max(deligne_ratio(p) for p in primerange(29, 98))
    print("C* max over 29..97", repr(cstar))
    s = s_chi((3, 5, 7), (1, 1, 1), 10.0)
    print("S_chi (3,5,7) k=(1,1,1) N=10", repr(s.real), repr(s.imag))
    print("ratio (3,5,7) N=10", repr(abs(s) / bound(3, 5, 7, 10.0)))
    print("sweep C_T", sweep_max_ratio())
    print("L(1/2) mod 5 quadratic", l_half((5,), (2,)))
    print("L(1/2) mod 3 quadratic", l_half((3,), (1,)))
    print("L(1/2) (3,5,7) k=(1,1,1)", l_half((3, 5, 7), (1, 1, 1)))
    for ks in ((1, 1, 1), (1, 2, 3)):
        print("dyadic aggregate A=10 (3,5,7)", ks, repr(dyadic_aggregate((3, 5, 7), ks, 10.0)))
