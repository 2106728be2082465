"""scikit-learn protocol compliance for the embedder, extractor and attacks."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from roimark.attacks import (
    GaussianNoise,
    HistogramEqualization,
    JpegCompression,
    MedianFilter,
    SaltPepperNoise,
)
from roimark.codec import WatermarkEmbedder, WatermarkExtractor, embed, extract
from roimark.exceptions import ValidationError

ALL_ESTIMATORS = [
    WatermarkEmbedder(logo=np.eye(4, dtype=np.uint8) + np.fliplr(np.eye(4, dtype=np.uint8))),
    WatermarkExtractor(),
    GaussianNoise(),
    SaltPepperNoise(),
    MedianFilter(),
    HistogramEqualization(),
    JpegCompression(),
]


def test_get_params_set_params_roundtrip():
    est = GaussianNoise(variance=0.02, seed=9)
    params = est.get_params()
    assert params == {"variance": 0.02, "seed": 9}
    est.set_params(variance=0.03)
    assert est.variance == 0.03 and est.seed == 9


def test_clone_preserves_params(logo):
    emb = WatermarkEmbedder(logo=logo, k_alpha=0.7, strength_floor=0.02)
    twin = clone(emb)
    assert twin.k_alpha == 0.7
    assert twin.strength_floor == 0.02
    np.testing.assert_array_equal(twin.logo, logo)


def test_clone_drops_fitted_state(corpus, logo):
    _, host, classes = corpus[0]
    emb = WatermarkEmbedder(logo=logo, classes=classes).fit(host)
    assert hasattr(emb, "side_info_")
    assert not hasattr(clone(emb), "side_info_")


def test_transform_before_fit_raises(corpus, logo):
    _, host, _ = corpus[0]
    with pytest.raises(NotFittedError):
        WatermarkEmbedder(logo=logo).transform(host)


def test_fit_requires_logo(corpus):
    _, host, _ = corpus[0]
    with pytest.raises(ValidationError):
        WatermarkEmbedder().fit(host)


def test_fit_exposes_planning_attributes(corpus, logo):
    _, host, classes = corpus[0]
    emb = WatermarkEmbedder(logo=logo, classes=classes).fit(host)
    assert emb.embedding_map_.shape == (512, 512)
    assert emb.densities_.shape == (16,)
    assert len(emb.blocks_) == 5
    assert emb.side_info_.blocks == emb.blocks_
    assert emb.side_info_.classes == tuple((c.name, c.coefficient) for c in classes)


def test_transform_matches_functional_embed(corpus, logo):
    _, host, classes = corpus[0]
    emb = WatermarkEmbedder(logo=logo, classes=classes).fit(host)
    want, side = embed(host, logo, classes=classes)
    np.testing.assert_array_equal(emb.transform(host), want)
    assert emb.side_info_ == side


def test_extractor_predict_matches_functional(corpus, logo):
    _, host, classes = corpus[0]
    wm, side = embed(host, logo, classes=classes)
    ext = WatermarkExtractor(side_info=side).fit()
    np.testing.assert_array_equal(ext.predict(wm), logo)
    got_logo, got_raw = ext.extract(wm)
    want_logo, want_raw = extract(wm, side)
    np.testing.assert_array_equal(got_logo, want_logo)
    np.testing.assert_array_equal(got_raw, want_raw)


def test_extractor_without_side_info_raises(corpus):
    _, host, _ = corpus[0]
    with pytest.raises(ValidationError):
        WatermarkExtractor().predict(host)


def test_embed_then_attack_pipeline(corpus, logo):
    _, host, classes = corpus[0]
    emb = WatermarkEmbedder(logo=logo, classes=classes).fit(host)
    pipe = Pipeline([("embed", emb), ("noise", GaussianNoise(variance=0.01, seed=2))])
    attacked = pipe.fit(host).transform(host)
    got = WatermarkExtractor(side_info=emb.side_info_).predict(attacked)
    np.testing.assert_array_equal(got, logo)


@pytest.mark.parametrize("est", ALL_ESTIMATORS, ids=lambda e: type(e).__name__)
def test_params_survive_clone(est):
    before = est.get_params()
    after = clone(est).get_params()
    for key, value in before.items():
        got = after[key]
        if isinstance(value, np.ndarray):
            np.testing.assert_array_equal(got, value)
        else:
            assert got == value
