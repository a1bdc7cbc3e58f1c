"""
End-to-end Iris classification and its sensitivity to the mapping offset d.

The mapping v2 = c * t2 + d has a free (c, d); the solver starts from (1, 0).
The scan below shows how strongly the test accuracy depends on that choice.
It reads the test labels, so it is a diagnostic and not a way to pick d.

Run with ``python3 demos/iris_pipeline.py``.
"""

import numpy as np

from nisqsvm import pipeline
from nisqsvm.pipeline import RunConfig, run
from nisqsvm.preprocess import PreprocessError
from nisqsvm.qcore import DEFAULT_NOISE

iris = pipeline.load_dataset("iris")

exact = run(RunConfig(), dataset=iris)
print(f"exact, default mapping {exact.prepared.coefficients.as_dict()}")
print(f"  accuracy {exact.accuracy:.2%}, alpha {np.round(exact.alpha, 4)}")

noisy = run(RunConfig(noise=DEFAULT_NOISE, seed=1), dataset=iris)
print(f"default noise: accuracy {noisy.accuracy:.2%}, JS vs ideal {noisy.js_vs_ideal:.4f}")

print("\naccuracy against d (c = 1):")
for d in np.round(np.arange(-1.5, 0.51, 0.1), 2):
    try:
        acc = run(RunConfig(cd=(1.0, float(d))), dataset=iris).accuracy
        print(f"  d = {d:+.1f}: {acc:.0%}")
    except PreprocessError:
        print(f"  d = {d:+.1f}: no positive mapping")
