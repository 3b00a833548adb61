"""Regenerate the Stieltjes constant table embedded in fundom.funcval.constants.

gamma_n is the limit of  sum_{k<=m} (log k)^n / k  -  (log m)^(n+1)/(n+1).
The tail beyond m is removed with Euler-Maclaurin corrections, so a modest m
at high working precision gives every printed digit. Run:

    python3 scripts/stieltjes_oracle.py
"""
import mpmath as mp

mp.mp.dps = 60
M = 2000
J = 14  # number of Bernoulli correction terms
N_MAX = 16


def stieltjes_by_limit(n, m=M):
    f = lambda x: mp.log(x) ** n / x
    partial = mp.fsum(f(k) for k in range(1, m + 1))
    val = partial - mp.log(m) ** (n + 1) / (n + 1) - f(m) / 2
    for j in range(1, J + 1):
        val -= mp.bernoulli(2 * j) / mp.factorial(2 * j) * mp.diff(f, m, 2 * j - 1)
    return val


if __name__ == "__main__":
    for n in range(N_MAX + 1):
        v = stieltjes_by_limit(n)
        ref = mp.stieltjes(n)
        print(f"    {mp.nstr(v, 20, min_fixed=-30, max_fixed=30)},  # n={n}, |limit - mpmath.stieltjes| = {mp.nstr(abs(v - ref), 3)}")
