"""Atom vectors and their algebra: sorting, products, contractions,
membership by exact packing, and dissipation detection on sequences.
"""

from mmslab import atoms, core, generators as gen
from mmslab.atoms import sort_atoms

print("=== sorting map and products ===")
raw = [0.1, 0.4, 0.0, 0.2]
alpha = sort_atoms(raw)
print(f"sorted {raw} -> {alpha.entries}")
beta = sort_atoms([0.5, 0.5])
prod = atoms.atom_product(alpha, beta)
print("product entries:", prod.entries)
print("the l1 norm is multiplicative:", prod.norm1(), "=", alpha.norm1() * beta.norm1())

print()
print("=== contractions ===")
fine = sort_atoms([0.5, 0.25, 0.25])
coarse = sort_atoms([0.5, 0.5])
print("grouping that realises the contraction:", atoms.is_contraction(fine, coarse))
print("no grouping exists the other way:", atoms.is_contraction(coarse, fine))
collapsed = atoms.truncate(sort_atoms([0.4, 0.3, 0.2, 0.05]), 2, "collapse")
print("collapsing truncation:", collapsed.entries, "(always a contraction)")

print()
print("=== membership is exact bin packing ===")
sp = core.space(
    ["a", "b", "c"], [[0, 1, 1], [1, 0, 1], [1, 1, 0]], [0.5, 0.3, 0.2]
)
print("atoms (0.4, 0.3) pack:", atoms.member(sp, sort_atoms([0.4, 0.3])).map)
print("atom 0.6 refuses:", atoms.member(sp, sort_atoms([0.6])))
carrier = gen.atom_space(fine, m_diffuse=4)
print("the canonical carrier accepts its own atoms:",
      atoms.member(carrier, fine) is not None)

print()
print("=== distance bound between atom families ===")
print("l1 bound for (0.5, 0.5) vs (0.5, 0.4):",
      atoms.pyramid_distance_upper(sort_atoms([0.5, 0.5]), sort_atoms([0.5, 0.4])))

print()
print("=== dissipation detection ===")
alpha = sort_atoms([0.25, 0.125, 0.125])
family = [gen.dissipation_family(alpha, 2.0, n) for n in range(1, 7)]
ev = atoms.detect_dissipation(family, alpha, 2.0)
print("equidistant family at scale 2.0 accepted:", ev.accepted)
print("  leftover-bin counts:", ev.bin_counts)
print("  largest leftover bin:", [round(v, 4) for v in ev.max_small])
one = core.space(["p"], [[0.0]], [1.0])
print("constant one-point sequence refused:",
      not atoms.detect_dissipation([one] * 6, alpha, 2.0).accepted)

print()
print("=== products of members carry product atoms ===")
rep = atoms.algebra_consistency_report(sort_atoms([0.5, 0.5]), sort_atoms([0.5, 0.5]), float("inf"))
print("consistency report:", {k: rep[k] for k in ("ok", "checked", "generator_dominated")})
