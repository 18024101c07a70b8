"""
Art / not-art classifier
========================

A nearest-centroid model over handcrafted image features, trained on two
folders of images.  Here both folders are synthesised: smooth structured
images stand in for art, uniform noise for not-art.
"""

from pathlib import Path

import numpy as np

from evoart.classifier import (classify_batch, generate_noise_corpus, generate_smooth_corpus,
                               noise_image, score, smooth_image, train)

root = Path("demo_output") / "corpus"
generate_smooth_corpus(30, (128, 128), seed=1, out_dir=root / "art")
generate_noise_corpus(30, (128, 128), seed=2, out_dir=root / "noise")

model = train(root / "art", root / "noise")
model.save(root / "model.txt")

rng = np.random.default_rng(3)
print("smooth image score:", round(score(smooth_image((128, 128), rng), model), 3))
print("noise image score: ", round(score(noise_image((128, 128), rng), model), 3))

# scores below 0.5 are labelled art
report = classify_batch(root / "art", model)
print("art folder -> art=%d not-art=%d" % report.counts)
