"""Mutual coupling and why sparse layouts help.

Closely spaced elements couple electromagnetically; the standard model
is a banded symmetric Toeplitz matrix whose coefficients decay with
inter-element distance.  Leakage is the off-diagonal energy fraction —
fewer tight pairs means less leakage.
"""

import numpy as np

from tosda import (
    CouplingModel,
    build_to_sda,
    build_ula,
    coupling_leakage,
    coupling_matrix,
)

model = CouplingModel()  # benchmark constants: |c1|=0.3, band 100
print("Coefficient magnitudes by distance:",
      [round(abs(model.coefficient(l)), 4) for l in range(6)])

print("\nCoupling matrix of a 4-element uniform array (magnitudes):")
c = coupling_matrix(build_ula(4), model)
print(np.round(np.abs(c), 3))

print("\nLeakage comparison at 9 sensors (the (6,3) configurations):")
rows = [("ULA(9)", build_ula(9))]
for variant in ("cna", "scna", "tna2"):
    arr, _ = build_to_sda(variant, 9)
    rows.append((arr.name, arr))
for name, arr in rows:
    leak = coupling_leakage(coupling_matrix(arr, model))
    print(f"  {name:22s} positions {list(arr.positions)}")
    print(f"  {'':22s} leakage {leak:.4f}")

print("\nShrinking the band to zero turns coupling off entirely:")
arr, _ = build_to_sda("cna", 9)
off = coupling_matrix(arr, CouplingModel(band_limit=0))
print(f"  band 0 leakage: {coupling_leakage(off):.1f} (identity matrix)")
