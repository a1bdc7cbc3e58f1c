"""
How far do noisy output distributions drift from the ideal ones?

Compares the depth-7 HHL circuit with the depth-18 baseline under the same
depolarizing and readout noise, then sweeps the depolarizing level.

Run with ``python3 demos/noise_divergence.py``.
"""

from nisqsvm import cli
from nisqsvm.qcore import DEFAULT_NOISE

table = cli.divergence_table(DEFAULT_NOISE, shots=8192, runs=5)

for name, rep in table["circuits"].items():
    print(f"{name:>14}: depth {rep['depth']:2d}, median JS {rep['js_median']:.4f}")

print("\nlevel   hhl_optimized   baseline")
for row in table["sweep"]:
    print(f"{row['level']:<7} {row['hhl_optimized']:<15.4f} {row['baseline']:.4f}")
