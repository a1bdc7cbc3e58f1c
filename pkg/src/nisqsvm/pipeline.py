"""
End-to-end run: dataset -> angles -> kernel oracle -> F -> solver circuit -> labels.

Without a noise model every circuit is simulated exactly and read out from
the state vector.  With one, every circuit is sampled with Monte-Carlo
trajectories and read out from counts.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import circuits, classify, data, kernelgen, metrics, preprocess
from .qcore import NoiseModel, reduced_density_matrix, run_exact, run_noisy

CIRCUITS = ("hhl_optimized", "baseline")
ORACLES = ("original", "new")
LABELS = (1, -1)


class PipelineError(ArithmeticError):
    """Numeric or degenerate failure inside the pipeline."""


@dataclass(frozen=True)
class RunConfig:
    dataset: str = "iris"                 # "iris", "ocr" or a path
    angle_mode: str = "quadrant_aware"
    circuit: str = "hhl_optimized"
    oracle: str = "new"
    shots: int = 8192
    noise: NoiseModel | None = None
    gamma: float = kernelgen.DEFAULT_GAMMA
    seed: int = 0
    cd: tuple[float, float] | None = None  # fix (c, d) instead of searching

    def __post_init__(self):
        if self.shots <= 0:
            raise ValueError("shots must be positive")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.circuit not in CIRCUITS:
            raise ValueError(f"circuit must be one of {CIRCUITS}")
        if self.oracle not in ORACLES:
            raise ValueError(f"oracle must be one of {ORACLES}")
        if self.angle_mode not in preprocess.ANGLE_MODES:
            raise ValueError(f"angle mode must be one of {tuple(preprocess.ANGLE_MODES)}")

    def noise_for(self, stage: int) -> NoiseModel | None:
        # one seed feeds both simulated stages through disjoint streams
        if self.noise is None:
            return None
        return dataclasses.replace(self.noise, seed=2 * self.seed + stage)

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["noise"] = None if self.noise is None else self.noise.as_dict()
        d["cd"] = None if self.cd is None else list(self.cd)
        return d


@dataclass(frozen=True)
class Prepared:
    dataset: data.LabeledDataset
    train_raw: tuple[np.ndarray, np.ndarray]
    coefficients: preprocess.MappingCoefficients
    mapped: np.ndarray
    unit: np.ndarray
    angles: np.ndarray
    train_unit: np.ndarray
    train_angles: tuple[float, float]


@dataclass
class RunResult:
    config: RunConfig
    prepared: Prepared
    khat: np.ndarray
    f: kernelgen.FMatrix
    alpha: tuple[float, float]
    alpha_classical: np.ndarray
    predicted: np.ndarray
    predicted_classical: np.ndarray
    depth: dict
    js_vs_ideal: float | None = None
    extras: dict = field(default_factory=dict)

    @property
    def accuracy(self) -> float:
        return metrics.accuracy(self.predicted, self.prepared.dataset.labels)

    @property
    def model(self) -> classify.SvmModel:
        return classify.SvmModel(*self.alpha, self.prepared.train_angles, self.config.gamma)

    def report(self) -> dict:
        return {
            "config": self.config.as_dict(),
            "dataset": self.prepared.dataset.name,
            "n_points": len(self.prepared.dataset),
            "coefficients": self.prepared.coefficients.as_dict(),
            "train_angles": list(self.prepared.train_angles),
            "accuracy": self.accuracy,
            "accuracy_classical": metrics.accuracy(self.predicted_classical, self.prepared.dataset.labels),
            "alpha": list(self.alpha),
            "alpha_classical": self.alpha_classical.tolist(),
            "khat": self.khat.tolist(),
            "F": self.f.as_dict(),
            "depth": self.depth,
            "js_vs_ideal": self.js_vs_ideal,
        }


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------

def load_dataset(spec: str) -> tuple[data.LabeledDataset, tuple[np.ndarray, np.ndarray]]:
    """Dataset and raw training points for ``"iris"``, ``"ocr"`` or a path.

    A directory path is read as OCR bitmaps (with its own ``printed_6.pbm`` /
    ``printed_9.pbm`` if present); a file path as an Iris-format CSV.
    """
    if spec == "iris":
        ds = data.load_iris()
        return ds, data.training_points_from_class_means(ds)
    if spec == "ocr":
        return data.load_ocr_images(), data.ocr_training_points()
    path = Path(spec)
    if path.is_dir():
        ds = data.load_ocr_images(path)
        glyphs = path if (path / "printed_6.pbm").exists() else None
        return ds, data.ocr_training_points(glyphs)
    if path.is_file():
        ds = data.load_iris(path)
        return ds, data.training_points_from_class_means(ds)
    raise data.DataError(f"unknown dataset {spec!r}")


def prepare(ds: data.LabeledDataset, train_raw, angle_mode: str = "quadrant_aware",
            cd: tuple[float, float] | None = None) -> Prepared:
    """Map, normalise and convert the test and training points to angles.

    The OCR features use the fixed HR/VR map; any other dataset gets
    coefficients solved from its training points.
    """
    t1, t2 = (np.asarray(t, dtype=float) for t in train_raw)
    if ds.name == "ocr":
        coef = preprocess.OCR_COEFFICIENTS
    else:
        coef = preprocess.solve_mapping_coefficients(t1, t2, candidates=None if cd is None else [cd])
    mapped = coef.apply(ds.points)
    unit = preprocess.normalize(mapped)
    train_unit = preprocess.normalize(coef.apply(np.stack([t1, t2])))
    if np.any(train_unit < 0):
        raise PipelineError("training points must map into the first quadrant")
    th = np.atleast_1d(preprocess.angles(unit, angle_mode))
    tr = preprocess.angle_of(train_unit)
    return Prepared(ds, (t1, t2), coef, mapped, unit, th, train_unit, (float(tr[0]), float(tr[1])))


def kernel_from_oracle(train_angles, oracle: str = "original", noise: NoiseModel | None = None,
                       shots: int = 8192) -> tuple[np.ndarray, circuits.Circuit]:
    """Normalised kernel read out of a training-data oracle circuit."""
    if oracle == "original":
        circ = circuits.build_oracle_original(train_angles)
        if len(train_angles) != 2:
            raise PipelineError("the two-qubit read-out needs exactly two training points")
        source = run_exact(circ) if noise is None else run_noisy(circ, None, noise, shots)
        return kernelgen.khat_from_counts(source), circ
    circ = circuits.build_oracle_new(train_angles)
    if noise is None:
        state = run_exact(circ)
        p1 = np.array([reduced_density_matrix(state, q)[1, 1].real for q in range(circ.num_qubits)])
        vecs = np.sqrt(np.clip(np.stack([1 - p1, p1], axis=1), 0, None))
    else:
        vecs = kernelgen.qubit_vectors_from_counts(run_noisy(circ, None, noise, shots))
    return kernelgen.khat_from_product_states(vecs), circ


def solver_circuit(name: str, y=(1, -1)) -> circuits.Circuit:
    if name == "hhl_optimized":
        return circuits.build_hhl_optimized(*circuits.hhl_rotation_angles(y))
    return circuits.build_baseline_qsvm(y=y)


def read_alpha(name: str, result) -> tuple[float, float]:
    try:
        if name == "hhl_optimized":
            return classify.readout_hhl(result)
        return classify.readout_baseline(result)
    except classify.DegenerateReadout as exc:
        raise PipelineError(str(exc)) from exc


def ideal_distribution(circ: circuits.Circuit) -> metrics.ProbDist:
    return metrics.dist_from_state(run_exact(circ))


def js_ideal_vs_noisy(circ: circuits.Circuit, noise: NoiseModel, shots: int) -> float:
    noisy = metrics.dist_from_counts(run_noisy(circ, None, noise, shots))
    return metrics.js_divergence(ideal_distribution(circ), noisy)


# ---------------------------------------------------------------------------
# full run
# ---------------------------------------------------------------------------

def run(config: RunConfig, dataset=None) -> RunResult:
    if dataset is None:
        ds, train_raw = load_dataset(config.dataset)
    else:
        ds, train_raw = dataset
    prep = prepare(ds, train_raw, config.angle_mode, config.cd)

    try:
        khat, oracle_circ = kernel_from_oracle(prep.train_angles, config.oracle,
                                               config.noise_for(0), config.shots)
        f = kernelgen.build_f(khat, config.gamma)
    except kernelgen.KernelError as exc:
        raise PipelineError(str(exc)) from exc
    if not np.array_equal(f.rounded, circuits.HHL_MATRIX):
        raise PipelineError(f"rounded F {f.rounded.tolist()} is not the matrix the circuits encode")

    y = np.array(LABELS, dtype=float)
    circ = solver_circuit(config.circuit, y)
    noise = config.noise_for(1)
    if noise is None:
        alpha = read_alpha(config.circuit, run_exact(circ))
        js = None
    else:
        counts = run_noisy(circ, None, noise, config.shots)
        alpha = read_alpha(config.circuit, counts)
        js = metrics.js_divergence(ideal_distribution(circ), metrics.dist_from_counts(counts))

    alpha_classical = kernelgen.solve_ls_svm_classical(f.rounded, y)
    model = classify.SvmModel(*alpha, prep.train_angles, config.gamma)
    classical = classify.SvmModel(*alpha_classical, prep.train_angles, config.gamma)
    depth = {
        "oracle": circuits.depth(oracle_circ),
        "solver": circuits.depth(circ),
    }
    return RunResult(
        config=config,
        prepared=prep,
        khat=khat,
        f=f,
        alpha=alpha,
        alpha_classical=alpha_classical,
        predicted=np.atleast_1d(classify.classify_point(model, prep.angles)),
        predicted_classical=np.atleast_1d(classify.classify_point(classical, prep.angles)),
        depth=depth,
        js_vs_ideal=js,
    )
