"""Delay margins and ultimate bounds for the delayed tracking-error loop.

Walks through the stability toolbox: build the error-system matrices for a
gain set, compute the Razumikhin delay margin, check which of the built-in
delay profiles are feasible, and evaluate the six ultimate-bound formulas
as the delay grows toward the margin.
"""

from arolc import (
    BoundParams,
    DelayProfile,
    GainSet,
    build_error_system,
    check_feasibility,
    delay_margin,
    max_delay,
    reaching_time,
    ultimate_bound,
)

gains = GainSet.identity(1)  # K1 = K2 = 1, Q = I, r = 1.1, beta = 1
system = build_error_system(gains)
print("error-system matrices for identity gains (n = 1):")
print("  A =\n", system.A)
print("  P (Lyapunov solution) =\n", system.P)
print("  E (margin matrix) =\n", system.E)

margin = delay_margin(gains)
print(f"\ndelay margin: {margin * 1000:.2f} ms")

print("\nfeasibility of the built-in profiles:")
for kind in ("S1", "S2", "S3", "S4"):
    peak = max_delay(DelayProfile(kind))
    ok = check_feasibility(gains, peak)
    print(f"  {kind}: peak {peak * 1000:5.1f} ms -> {'feasible' if ok else 'NOT feasible'}")

print("\nmargin sensitivity to the scalar analysis parameters:")
for r in (1.05, 1.1, 1.5, 2.0):
    print(f"  r = {r:4.2f}: {delay_margin(GainSet.identity(1, r=r)) * 1000:7.2f} ms")
for beta in (0.5, 1.0, 2.0):
    g = GainSet.identity(1, beta=beta)
    print(f"  beta = {beta:3.1f}: {delay_margin(g) * 1000:7.2f} ms")

print("\nultimate bounds vs delay (moderate uncertainty):")
print("  h [ms] | " + " | ".join(f"bound {i}" for i in range(1, 7)))
for h in (0.0, 0.04, 0.08, 0.11):
    bp = BoundParams(c=0.5, Gamma=0.2, theta_norm=0.1, alpha=2.0,
                     epsilon=0.1, gamma=1e-3, c_hat=0.4, h=h)
    row = [f"{ultimate_bound(i, gains, bp):7.3f}" for i in range(1, 7)]
    print(f"  {h * 1000:6.1f} | " + " | ".join(row))

bp = BoundParams(c=0.5, Gamma=0.2, theta_norm=0.1, c_hat=0.4, h=0.08)
bound = ultimate_bound(1, gains, bp)
print(f"\nworst-case reaching time from ||e(0)|| = 3 at decay rate 0.5: "
      f"{reaching_time(3.0, bound, 0.5):.2f} s")
