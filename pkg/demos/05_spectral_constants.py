"""Spectral constants of 1-D weighted grids: the (2,2) constant, log-Sobolev
certification, and the quantile coupling scale that separates the interval
tower from the Gaussian tower.
"""

import math

from mmslab import functional as fn, generators as gen

print("=== (2,2) constants ===")
for m in (64, 128, 256, 512):
    c = fn.poincare_c22(fn.unit_interval_grid(m))
    print(f"interval, {m:4d} cells: {c:.8f}   (1/pi = {1 / math.pi:.8f})")
for m in (128, 512):
    c = fn.poincare_c22(fn.gaussian_grid(m))
    print(f"gaussian, {m:4d} cells: {c:.8f}   (target 1)")

print()
print("=== log-Sobolev certification ===")
for name, grid, const in (
    ("interval", fn.unit_interval_grid(512), 1 / math.pi),
    ("gaussian", fn.gaussian_grid(512), 1.0),
):
    rep = fn.log_sobolev_check(grid, const, trials=1000)
    print(
        f"{name}: candidate {const:.5f}, worst violation {rep.max_violation:.2e}, "
        f"certified lower bound {rep.lower_bound:.6f}"
    )

print()
print("=== trial lower bounds for general (p, q) ===")
grid = fn.unit_interval_grid(512)
for p, q in ((2, 2), (1, 2), (3, 2), (2, 3)):
    print(f"C_({p},{q}) >= {fn.poincare_pq_lower(grid, p, q, trials=128):.6f}")

print()
print("=== quantile coupling scale ===")
print("smallest normal deviation pushing onto the unit interval:",
      fn.gaussian_domination_scale(fn.unit_interval_grid(512)))
print("1/sqrt(2 pi) =", 1 / math.sqrt(2 * math.pi))
print("pushing onto a normal law returns its own deviation:",
      fn.gaussian_domination_scale(fn.gaussian_grid(2048, sigma=0.7)))

print()
print("=== the separation of the two towers ===")
scale = fn.gaussian_domination_scale(fn.unit_interval_grid(512))
c22 = fn.poincare_c22(fn.unit_interval_grid(512))
print(f"coupling scale {scale:.5f} vs (2,2) constant {c22:.5f}: margin {scale - c22:.4f}")
print("the margin exceeds 0.08, so no rescaling can match both numbers at once")

print()
print("=== every finite space has infinite constants ===")
rep = fn.mm_disconnected_constant(gen.two_point(2.0, 0.3))
print("two-point space: disconnected =", rep.disconnected,
      ", witness variance =", rep.witness_variance,
      "(its slope vanishes, so the constants blow up)")
