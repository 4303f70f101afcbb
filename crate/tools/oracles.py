"""Reference values for the closed-form model tests, evaluated with mpmath.

Run: python3 tools/oracles.py
"""
from mpmath import mp, mpf, exp, sqrt, tanh, pi

mp.dps = 30
hbar = mpf("1.054571817e-34")
h = mpf("6.62607015e-34")
kb = mpf("1.380649e-23")
e = mpf("1.602176634e-19")


def q_total(n, q_low, q_high, n_c, beta, f, T):
    th = tanh(hbar * 2 * pi * f / (2 * kb * T))
    return 1 / (th / q_low / (1 + n / n_c) ** beta + 1 / q_high)


def decay(t, n_in, t1_in, t1_res):
    return exp(n_in * (exp(-t / t1_in) - 1)) * exp(-t / t1_res)


def e_c(c):
    return e**2 / (2 * c * h)


def f_ge(ec, ej):
    return sqrt(8 * ej * ec) - ec


print("q_total(n=46, 1e5, 5e5, 46, 0.43, 9.8e9, 10mK) =", q_total(46, 1e5, 5e5, 46, mpf("0.43"), mpf("9.8e9"), mpf("0.01")))
print("q_total(n=0, 1e5, 5e5, T=1mK) =", q_total(0, 1e5, 5e5, 46, mpf("0.43"), mpf("9.8e9"), mpf("0.001")))
print("tanh factor 9.8 GHz 10 mK =", tanh(hbar * 2 * pi * mpf("9.8e9") / (2 * kb * mpf("0.01"))))
for t in ["0.5e-6", "1e-6", "2e-6", "5e-6"]:
    print(f"P({t}) n_in=0.5 row1 =", decay(mpf(t), mpf("0.5"), mpf("0.71e-6"), mpf("7.23e-6")))
print("q_tls single 0.03*2.74e-4 =", 1 / (mpf("0.03") * mpf("2.74e-4")))
print("q_coherent 22 V/m =", mpf("5.5e4") * sqrt(1 + mpf("3e-3") / mpf("0.01") * 22**2))
print("E_C(42 fF) =", e_c(mpf("42e-15")))
print("E_C(56.6 fF) =", e_c(mpf("56.6e-15")))
for ec, ej in [(461, 11.11), (389, 10.51), (362, 11.51), (342, 10.28)]:
    print(f"f_ge({ec}, {ej}) =", f_ge(mpf(ec) * 1e6, mpf(ej) * 1e9))
print("lc(5nH, 50fF) =", 1 / (2 * pi * sqrt(mpf("5e-9") * mpf("50e-15"))))
print("C for 9.1 GHz at 5 nH =", 1 / ((2 * pi * mpf("9.1e9")) ** 2 * mpf("5e-9")))
print("Q(5.94 GHz, 0.71 us) =", 2 * pi * mpf("5.94e9") * mpf("0.71e-6"))
print("Q(5.94 GHz, 7.23 us) =", 2 * pi * mpf("5.94e9") * mpf("7.23e-6"))
print("Q/A row1 um^-2 =", 2 * pi * mpf("5.94e9") * mpf("0.71e-6") / (39 * 36))
print("Q/A pumped um^-2 =", 2 * pi * mpf("5.94e9") * mpf("1.23e-6") / (39 * 36))
p = mpf(10) ** (mpf(-140) / 10) * mpf("1e-3")
kappa = 2 * pi * mpf("0.6e6")
ke = kappa / 2
print("photon number -140 dBm =", 4 * ke * p / (hbar * 2 * pi * mpf("9e9") * kappa**2))
