import numpy as np
import pytest
from scipy import ndimage

from evoart.classifier import (DIMENSION, CentroidModel, ClassifierError, ModelIncompatibleError,
                               classify_batch, extract_features, generate_noise_corpus,
                               generate_smooth_corpus, label, laplacian_variance, noise_image,
                               radial_power_spectrum, score, smooth_image, synthetic_model, train,
                               train_from_features)


def test_uniform_gray_features():
    f = extract_features(np.full((64, 64, 3), 128, np.uint8))
    assert f.shape == (DIMENSION,)
    assert np.isfinite(f).all()
    # zero variance, zero gradient, zero entropy, zero edges
    assert (f[27:30] == 0).all()
    assert f[30] == 1.0 and (f[31:38] == 0).all()
    assert f[38] == 0 and f[39] == 0 and f[56] == 0


def test_features_deterministic():
    img = noise_image((40, 30), np.random.default_rng(0))
    assert np.array_equal(extract_features(img), extract_features(img.copy()))


def test_noise_has_more_high_frequency_energy_than_smooth():
    rng = np.random.default_rng(0)
    gray_noise = noise_image((128, 128), rng).mean(axis=2)
    yy, xx = np.mgrid[0:128, 0:128]
    gradient = (xx * 2.0).astype(float)
    assert radial_power_spectrum(gray_noise)[-4:].sum() > radial_power_spectrum(gradient)[-4:].sum()


def test_blur_lowers_laplacian_variance():
    rng = np.random.default_rng(3)
    gray = rng.uniform(0, 255, (64, 64))
    prev = laplacian_variance(gray)
    for sigma in (0.5, 1.0, 2.0, 4.0):
        v = laplacian_variance(ndimage.gaussian_filter(gray, sigma, mode="wrap"))
        assert v < prev
        prev = v


def test_noise_corpus(tmp_path):
    paths = generate_noise_corpus(20, (32, 32), 5, tmp_path)
    assert len(paths) == 20
    from PIL import Image
    means = [np.asarray(Image.open(p)).mean() for p in paths]
    assert 120 <= np.mean(means) <= 135
    again = generate_noise_corpus(20, (32, 32), 5, tmp_path / "b")
    assert all(p.read_bytes() == q.read_bytes() for p, q in zip(paths, again))


def test_noise_corpus_rejects_zero(tmp_path):
    with pytest.raises(ValueError):
        generate_noise_corpus(0, (8, 8), 0, tmp_path)


def _two_class_features(n=6):
    rng = np.random.default_rng(0)
    art = np.array([extract_features(smooth_image((64, 64), rng)) for _ in range(n)])
    notart = np.array([extract_features(noise_image((64, 64), rng)) for _ in range(n)])
    return art, notart


def test_swapped_training_mirrors_score():
    art, notart = _two_class_features()
    m1 = train_from_features(art, notart)
    m2 = train_from_features(notart, art)
    img = smooth_image((64, 64), np.random.default_rng(77))
    assert score(img, m1) == pytest.approx(1 - score(img, m2), abs=1e-12)


def test_identical_classes_give_half():
    art, _ = _two_class_features(3)
    m = train_from_features(art, art)
    assert score(smooth_image((64, 64), np.random.default_rng(1)), m) == pytest.approx(0.5)


def test_held_out_accuracy(tmp_path):
    generate_smooth_corpus(30, (96, 96), 1, tmp_path / "art")
    generate_noise_corpus(30, (96, 96), 2, tmp_path / "noise")
    model = train(tmp_path / "art", tmp_path / "noise")
    rng = np.random.default_rng(99)
    correct = sum(label(smooth_image((96, 96), rng), model) == "art" for _ in range(20))
    correct += sum(label(noise_image((96, 96), rng), model) == "not-art" for _ in range(20))
    assert correct / 40 >= 0.9


def test_train_needs_two_images(tmp_path):
    generate_smooth_corpus(1, (16, 16), 0, tmp_path / "art")
    generate_noise_corpus(3, (16, 16), 0, tmp_path / "noise")
    with pytest.raises(ClassifierError):
        train(tmp_path / "art", tmp_path / "noise")


def test_model_round_trip(tmp_path):
    m = synthetic_model(8, (48, 48))
    m.save(tmp_path / "m.txt")
    back = CentroidModel.load(tmp_path / "m.txt")
    assert np.array_equal(back.scale, m.scale)
    assert np.array_equal(back.art_centroid, m.art_centroid)
    assert np.array_equal(back.notart_centroid, m.notart_centroid)
    img = smooth_image((48, 48), np.random.default_rng(4))
    assert score(img, back) == score(img, m)


def test_model_version_mismatch():
    m = synthetic_model(8, (48, 48))
    old = CentroidModel("handcrafted-v0", m.dimension, m.scale, m.art_centroid, m.notart_centroid)
    with pytest.raises(ModelIncompatibleError):
        score(np.zeros((8, 8, 3), np.uint8), old)


def test_malformed_model_file(tmp_path):
    (tmp_path / "bad.txt").write_text("extractor_id x\ndimension 3\n1 2\n")
    with pytest.raises(ClassifierError):
        CentroidModel.load(tmp_path / "bad.txt")


def test_batch_empty_and_broken(tmp_path):
    m = synthetic_model(8, (48, 48))
    rep = classify_batch(tmp_path, m)
    assert rep.rows == [] and rep.counts == (0, 0)
    (tmp_path / "broken.png").write_bytes(b"not an image")
    generate_noise_corpus(2, (16, 16), 0, tmp_path)
    rep = classify_batch(tmp_path, m)
    assert len(rep.rows) == 2 and len(rep.failures) == 1
    rep.write_csv(tmp_path / "out.csv")
    assert (tmp_path / "out.csv").read_text().startswith("path,score,label")


def test_batch_missing_directory(tmp_path):
    with pytest.raises(ClassifierError):
        classify_batch(tmp_path / "nope", synthetic_model(8, (48, 48)))
