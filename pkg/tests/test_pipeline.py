import math

import numpy as np
import pytest

from nisqsvm import pipeline, preprocess
from nisqsvm.data import DataError
from nisqsvm.pipeline import PipelineError, RunConfig, run
from nisqsvm.qcore import DEFAULT_NOISE


@pytest.fixture(scope="module")
def iris():
    return pipeline.load_dataset("iris")


@pytest.fixture(scope="module")
def ocr():
    return pipeline.load_dataset("ocr")


def test_training_points_land_on_targets(iris):
    prep = pipeline.prepare(*iris)
    n = np.reshape(preprocess.CANONICAL_TARGETS, (2, 2))
    assert np.allclose(prep.train_unit, n / np.linalg.norm(n, axis=1, keepdims=True), atol=1e-6)
    assert prep.angles.shape == (100,)


def test_ocr_uses_fixed_map(ocr):
    prep = pipeline.prepare(*ocr)
    assert prep.coefficients == preprocess.OCR_COEFFICIENTS
    assert np.allclose(prep.train_unit, np.reshape(preprocess.CANONICAL_TARGETS, (2, 2)), atol=0.02)


@pytest.mark.parametrize("circuit", pipeline.CIRCUITS)
@pytest.mark.parametrize("oracle", pipeline.ORACLES)
@pytest.mark.parametrize("name", ["iris", "ocr"])
def test_quantum_labels_equal_classical(name, oracle, circuit, iris, ocr):
    res = run(RunConfig(dataset=name, circuit=circuit, oracle=oracle), dataset=iris if name == "iris" else ocr)
    assert np.array_equal(res.predicted, res.predicted_classical)


def test_circuits_agree_on_labels(iris):
    a = run(RunConfig(circuit="hhl_optimized"), dataset=iris)
    b = run(RunConfig(circuit="baseline"), dataset=iris)
    assert np.array_equal(a.predicted, b.predicted)


def test_exact_kernel_and_depths(iris):
    res = run(RunConfig(oracle="original"), dataset=iris)
    assert res.khat[0, 1] == pytest.approx(0.2446, abs=0.005)
    assert res.depth == {"oracle": 9, "solver": 7}
    assert run(RunConfig(circuit="baseline"), dataset=iris).depth == {"oracle": 1, "solver": 18}


def test_quadrant_aware_beats_prior_art_on_ocr(ocr):
    qa = run(RunConfig(dataset="ocr"), dataset=ocr).accuracy
    pa = run(RunConfig(dataset="ocr", angle_mode="prior_art"), dataset=ocr).accuracy
    assert qa >= 0.95
    assert pa < qa


def test_noisy_run_is_close_and_deterministic(iris):
    cfg = RunConfig(noise=DEFAULT_NOISE, seed=3)
    a = run(cfg, dataset=iris)
    b = run(cfg, dataset=iris)
    exact = run(RunConfig(), dataset=iris)
    assert a.report() == b.report()
    assert abs(a.accuracy - exact.accuracy) <= 0.05
    assert 0 < a.js_vs_ideal < 1


def test_noise_stages_get_distinct_seeds():
    cfg = RunConfig(noise=DEFAULT_NOISE, seed=4)
    assert cfg.noise_for(0).seed != cfg.noise_for(1).seed
    assert RunConfig().noise_for(0) is None


def test_fixed_cd_is_used(iris):
    res = run(RunConfig(cd=(1.0, -1.2)), dataset=iris)
    assert (res.prepared.coefficients.c, res.prepared.coefficients.d) == (1.0, -1.2)


def test_bad_gamma_breaks_rounding(iris):
    # gamma = 1 puts 2 on the diagonal of F, which the circuits do not encode
    with pytest.raises(PipelineError, match="rounded F"):
        run(RunConfig(gamma=1.0), dataset=iris)


def test_infinite_gamma_still_rounds(iris):
    assert run(RunConfig(gamma=math.inf), dataset=iris).f.rounded.tolist() == [[1.0, 0.5], [0.5, 1.0]]


def test_config_validation():
    for kw in ({"shots": 0}, {"gamma": 0}, {"circuit": "x"}, {"oracle": "x"}, {"angle_mode": "x"}):
        with pytest.raises(ValueError):
            RunConfig(**kw)


def test_report_keys(iris):
    rep = run(RunConfig(), dataset=iris).report()
    assert {"config", "accuracy", "accuracy_classical", "alpha", "khat", "F", "depth"} <= set(rep)
    assert rep["n_points"] == 100


def test_unknown_dataset():
    with pytest.raises(DataError):
        pipeline.load_dataset("/no/such/path")
