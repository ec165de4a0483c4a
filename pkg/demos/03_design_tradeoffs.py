"""Degrees of freedom and redundancy across designs and sizes.

The closed-form sensor splits are fast but only as good as their
rounding; the exhaustive search realizes every candidate geometry and
counts its consecutive lags, so it is the ground truth.  Disagreements
are printed, not hidden — the TNA-II closed forms in particular promise
far more than their printed geometry delivers.
"""

from tosda import (
    build_to_sda,
    closed_form_redundancy,
    corollary_bounds,
    dof_sweep,
    l3_bound,
    redundancy_toeca,
)

print("Closed form vs exhaustive search (consecutive lag counts):")
print(f"{'variant':8s} {'N':>3s} {'closed':>7s} {'brute':>7s}  note")
for row in dof_sweep(["cna", "scna", "tna2"], [6, 8, 10]):
    note = "" if row.agreement else "<-- closed form suboptimal or broken"
    print(f"{row.variant:8s} {row.N:3d} {str(row.dof_closed):>7s} "
          f"{row.dof_brute:7d}  {note}")

print("\nAchieved redundancy of built designs (k_tilde / Z, lower is better):")
for variant in ("cna", "scna", "tna2"):
    for n in (8, 9, 12):
        arr, _ = build_to_sda(variant, n)
        rep = redundancy_toeca(arr)
        print(f"  {variant:5s} N={n:2d}: R_T={rep.r_t:7.3f}  "
              f"(Z={rep.Z}, k~={rep.k_tilde}, L3={rep.l3:.3f})")

print("\nClosed-form redundancy envelope (published constants):")
for variant in ("cna", "scna", "tna2"):
    low, high = corollary_bounds(variant)
    samples = {n: round(closed_form_redundancy(variant, n), 3)
               for n in (3, 5, 10, 50)}
    print(f"  {variant:5s}: envelope [{low}, {high}], samples {samples}")

print("\nUniversal lower-bound curve L3(N) (caution: provably leaky — "
      "near-optimal arrays undercut it):")
print("  " + ", ".join(f"L3({n})={l3_bound(n):.3f}" for n in (2, 4, 8, 16)))
