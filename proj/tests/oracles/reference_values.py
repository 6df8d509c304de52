"""Extended-precision reference values frozen into the C++ tests.

Run with: python3 tests/oracles/reference_values.py
Every number printed here is independent of the C++ implementation.
"""
from mpmath import mp, mpf, sqrt, exp, log, pi, erfc, findroot, ncdf, npdf, floor

mp.dps = 50


def phi(x):
    return exp(-x * x / 2) / sqrt(2 * pi)


def Phi(x):
    return erfc(-x / sqrt(2)) / 2


def f(x):
    return x * Phi(x) + phi(x)


def show(label, v):
    print(f"{label:50s} {mp.nstr(v, 20)}")


show("phi(0)", phi(0))
show("phi(2)", phi(2))
show("Phi^-1(0.975)", findroot(lambda z: Phi(z) - mpf("0.975"), 1.96))
show("Phi(1.959963984540054)", Phi(mpf("1.959963984540054")))
show("f(-1.41421356)", f(mpf("-1.41421356")))
show("f(-sqrt2)", f(-sqrt(2)))
show("f(-3)", f(-3))
show("f(3)", f(3))
show("log f(-2)", log(f(-2)))
show("log f(-8)", log(f(-8)))
show("log f(-10)", log(f(-10)))
show("log f(-20)", log(f(-20)))
show("log f(-40)", log(f(-40)))
show("log f(-50)", log(f(-50)))
show("log f(-100)", log(f(-100)))
show("log f(-300)", log(f(-300)))
show("log phi(40) - 2 log 40", log(phi(40)) - 2 * log(40))
show("phi(2)/8", phi(2) / 8)
show("phi(2)/4", phi(2) / 4)
show("kg k=2 theta=(0,1): sqrt(.5) f(-sqrt2)", sqrt(mpf("0.5")) * f(-sqrt(2)))
show("kg zero gap sqrt(.5) phi(0)", sqrt(mpf("0.5")) * phi(0))
show("log Phi(-40)", log(Phi(-40)))
show("log Phi(-10)", log(Phi(-10)))


def q(k, smax, s):
    return 4 * smax * mpf(k) ** (-mpf(1) / 8) * mpf(s) ** (-mpf(1) / 8) * exp(
        -mpf(k) ** (mpf(1) / 4) * mpf(s) ** (mpf(1) / 4) / (8 * smax ** 2))


show("q(k=10, smax=1, s=750)", q(10, 1, 750))

# Concentration bound, worked case.
sigma, m, eps = 1, 25, mpf("0.6")
show("concentration bound (1,25,0.6)", 2 * sigma / (sqrt(m) * eps) * exp(-m * eps ** 2 / (2 * sigma ** 2)))
show("exact tail 2 Phi(-3)", 2 * Phi(-3))

# Fixed-rate bounds, instance 1, n=500, alpha0=0.1.
n = 500
m0 = 50
db = mpf(1)
upper = sqrt(2) / (sqrt(pi * m0) * db) * exp(-db ** 2 / 8 * m0) + 9 * (
    1 / (sqrt(2 * pi * m0) * mpf("0.5")) * exp(-mpf("0.25") / 2 * m0))
show("thm4 PE upper inst1 n=500", upper)
g = mpf("0.5")
lower = (db / (2 * sqrt(2 * pi) * (1 + db ** 2 / 4 * n))) * (g * m0 / (sqrt(2 * pi) * (1 + g ** 2 * n))) * exp(
    -(db ** 2 / 8 + g ** 2 / 2) * n)
show("thm4 PE lower inst1 n=500", lower)

show("cr rate inst2 13/13.5", mpf(13) / mpf("13.5"))
