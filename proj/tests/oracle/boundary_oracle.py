"""Independent reference values for the unit tests.

Solves the boundary ODE with SciPy's DOP853 on the unscaled flow formula and
evaluates the value function with mpmath. Run: python3 boundary_oracle.py
"""
import mpmath as mp
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

mp.mp.dps = 40
MU, ETA, RHO, Q = 1.0, 1.0, 1.0, 0.5

disc = mp.sqrt(MU**2 + 2 * RHO * ETA**2)
ALPHA = (-MU - disc) / ETA**2
BETA = (-MU + disc) / ETA**2
B_CIRC = mp.log(BETA**2 / ALPHA**2) / (ALPHA - BETA)
a, b_ = float(ALPHA), float(BETA)


def flow(i, y):
    s = i - y[0]
    num = a**2 * mp.exp(b_ * s) - b_**2 * mp.exp(a * s)
    den = b_ * mp.exp(a * s) - a * mp.exp(b_ * s)
    return [float(Q / (a * b_) * num / den)]


sol = solve_ivp(flow, (0.0, 2.0), [float(B_CIRC)], method="DOP853",
                rtol=1e-13, atol=1e-15, dense_output=True)
bnd = lambda i: sol.sol(i)[0]
i_star = brentq(lambda i: bnd(i) - i, 0.0, float(B_CIRC), xtol=1e-15)


def value(x, i):
    x, i = mp.mpf(x), mp.mpf(i)
    if i >= i_star:
        return mp.exp(-Q * i) * (x - i - 1 / Q) + (1 / Q + MU / RHO) * mp.exp(-Q * i_star)
    b = mp.mpf(bnd(float(i)))
    if x >= b:
        return mp.exp(-Q * i) * (x - b + MU / RHO)
    s = x - b
    return mp.exp(-Q * i) / (ALPHA - BETA) * (ALPHA / BETA * mp.exp(BETA * s)
                                               - BETA / ALPHA * mp.exp(ALPHA * s))


print(f"b_circ      {mp.nstr(B_CIRC, 20)}")
print(f"i_star      {i_star:.17g}")
for i in (0.3, 1.0):
    print(f"b({i})      {bnd(i):.17g}")
for x, i in ((0.5, 0.2), (0.7, 0.1), (1.0, 0.2), (1.0, 0.7)):
    print(f"v({x},{i})  {mp.nstr(value(x, i), 17)}")
