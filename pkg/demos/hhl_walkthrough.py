"""
Walk through the two-point LS-SVM solved by the 4-qubit HHL circuit.

1. Read the normalised kernel out of the training-data oracle.
2. Form F = K + I/gamma and round it to the matrix the circuit encodes.
3. Simulate the HHL circuit and read alpha from two amplitudes.
4. Compare with the classical solution F^-1 y.

Run with ``python3 demos/hhl_walkthrough.py``.
"""

import math

import numpy as np

from nisqsvm import circuits, classify, kernelgen, pipeline
from nisqsvm.qcore import run_exact

train = np.array([[0.987, 0.159], [0.345, 0.935]])
angles = tuple(np.arctan2(train[:, 1], train[:, 0]))

khat, oracle = pipeline.kernel_from_oracle(angles, "original")
print(f"oracle depth {circuits.depth(oracle)}, Khat =\n{np.round(khat, 4)}")

f = kernelgen.build_f(khat, gamma=8)
print(f"F exact =\n{np.round(f.exact, 4)}\nF rounded =\n{f.rounded}")
print("eigenvalues of rounded F:", np.linalg.eigvalsh(f.rounded))

circ = circuits.build_hhl_optimized(*circuits.hhl_rotation_angles((1, -1)))
state = run_exact(circ)
alpha = classify.readout_hhl(state)
classical = kernelgen.solve_ls_svm_classical(f.rounded, (1, -1))
print(f"HHL depth {circuits.depth(circ)}, alpha = {np.round(alpha, 4)}, classical = {classical}")

model = classify.SvmModel(*alpha, angles)
for name, theta in (("training point 1", angles[0]), ("training point 2", angles[1]),
                    ("(1, -1)/sqrt2", -math.pi / 4)):
    print(f"{name:>18}: label {classify.classify_point(model, theta):+d}")
