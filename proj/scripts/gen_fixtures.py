#!/usr/bin/env python3
"""Generates the frozen numeric fixtures used by the C++ unit tests.

Everything here is computed independently of the C++ sources: plain
term-by-term evaluation of the model equations with numpy/scipy, printed
at 17 significant digits. Paste the output into tests/fixture_values.hpp
rather than importing it at build time.
"""
import numpy as np
from scipy.integrate import quad

# Mean parameter set (epsilon stored directly, 1-eps mean is 0.9).
EPS = 0.1
THETA = 0.1
BETA_M = 4.0
BETA_F = 4.0
BETA_F_T = 2.0
GAMMA_F = 1.0 / 1.3
GAMMA_M = 1.0 / 0.6
P = 0.2
MU_F = 1.0 / 30.0
MU_M = 1.0 / 30.0
A1 = 0.5
A2 = 0.2
A3 = 0.4
U_MAX = 3.0
ALPHA_MAX = 3.0
J_MAX = 200.0

KAPPA = np.array([1.0, 1.0, 3.0, 3.0, 3.0])
PHI = np.ones(5)
NU = 0.1
Q = np.diag([1.0, 1.0, 0.0, 1.0, 0.0])


def drift(x):
    uf, if_, vf, im, vm = x
    sus_f = 1.0 - uf - if_ - vf
    force_m = BETA_F * uf + BETA_F_T * if_
    return np.array([
        (sus_f + EPS * vf) * (1.0 - P) * BETA_M * im - (GAMMA_F + MU_F) * uf,
        (sus_f + EPS * vf) * P * BETA_M * im - (GAMMA_F + MU_F) * if_,
        -EPS * BETA_M * vf * im - (MU_F + THETA) * vf,
        force_m * ((1.0 - im - vm) + EPS * vm) - (GAMMA_M + MU_M) * im,
        -force_m * EPS * vm - (MU_M + THETA) * vm,
    ])


def control_matrix(x):
    uf, if_, vf, im, vm = x
    g = np.zeros((5, 5))  # rows: states, cols: (w1, w2, u1, u2, alpha)
    g[0, 4] = -uf
    g[1, 4] = uf
    g[2, 0] = MU_F
    g[2, 2] = 1.0 - uf - if_ - vf
    g[4, 1] = MU_M
    g[4, 3] = 1.0 - im - vm
    return g


def features(e):
    uf, if_, vf, im, vm = e
    return np.array([
        uf, im, vm, if_, vf,
        uf**2, if_**2, vf**2, im**2, vm**2,
        uf * im, uf * vm, if_ * im, if_ * vm, vf * im, vf * vm,
        uf**2 * im, uf**2 * vm, if_**2 * im, if_**2 * vm,
        im**2 * uf, im**2 * if_, im**2 * vf,
        vf**2 * im, vf**2 * vm, vm**2 * uf, vm**2 * if_, vm**2 * vf,
    ])


def feature_jacobian(e):
    j = np.zeros((28, 5))
    h = 1e-7
    for c in range(5):  # central differences are plenty for fixture work
        ep = e.copy(); ep[c] += h
        em = e.copy(); em[c] -= h
        j[:, c] = (features(ep) - features(em)) / (2 * h)
    return j


def control_cost(u):
    total = 0.0
    for i in range(5):
        val, err = quad(lambda th, k=KAPPA[i], f=PHI[i]: k * f * np.arctanh(th / k),
                        0.0, u[i], epsabs=1e-13, epsrel=1e-13)
        total += 2.0 * val
    return total


def fmt(x):
    return np.format_float_scientific(x, precision=17)


print("// --- G1: drift at state (0.1, 0.05, 0.2, 0.1, 0.1), mean params ---")
x1 = np.array([0.1, 0.05, 0.2, 0.1, 0.1])
for i, v in enumerate(drift(x1)):
    print(f"g1_drift[{i}] = {v!r}")

print("\n// --- hand check: V_f drift at (0,0,0.3,0,0) ---")
print(repr(drift(np.array([0.0, 0.0, 0.3, 0.0, 0.0]))[2]))

print("\n// --- G2: approximate Hamiltonian at fixed (state, control, w) ---")
u2 = np.array([0.2, 0.1, 0.5, 0.2, 0.3])
w2 = np.array([((k + 1) / 100.0) * (-1.0) ** k for k in range(28)])
e2 = x1.copy()  # x_ref = 0
phi = features(e2)
jac = feature_jacobian(e2)
rhs = drift(x1) + control_matrix(x1) @ u2
ham = e2 @ Q @ e2 + control_cost(u2) - NU * phi @ w2 + (jac.T @ w2) @ rhs
print(f"g2_hamiltonian = {ham!r}")
print(f"  state cost  = {e2 @ Q @ e2!r}")
print(f"  control cost= {control_cost(u2)!r}")

print("\n// --- control-effort cost, scalar kappa=1 phi=1 u=0.5 ---")
val, err = quad(lambda th: np.arctanh(th), 0.0, 0.5, epsabs=1e-14, epsrel=1e-14)
print(f"quadrature 2*I = {2*val!r}  (err {err:.1e})")
u = 0.5
closed = 2.0 * (u * np.arctanh(u) + 0.5 * np.log1p(-u * u))
print(f"closed form    = {closed!r}")
print(f"boundary limit kappa^2*phi*ln4 (k=1,phi=1) = {np.log(4.0)!r}")

print("\n// --- merge coefficient gamma = sqrt(-2 ln 0.95) ---")
print(repr(np.sqrt(-2.0 * np.log(0.95))))

print("\n// --- membership constants ---")
print(f"exp(-1/2) = {np.exp(-0.5)!r}")
print(f"exp(-4.5) = {np.exp(-4.5)!r}")

print("\n// --- first Adam-style step, grad=1, b1=0.9 b2=0.999 eta=0.01 eps=1e-8 ---")
m = 0.1 * 1.0
v = 0.001 * 1.0
mh = m / (1 - 0.9)
vh = v / (1 - 0.999)
print(f"delta_w = {-0.01 * mh / (np.sqrt(vh) + 1e-8)!r}")

print("\n// --- running cost rates ---")
print(f"w1=w2=1: {0.5 * A1 * 2.0!r}")
print(f"u1=u2=3: {0.5 * A2 * 18.0!r}")
