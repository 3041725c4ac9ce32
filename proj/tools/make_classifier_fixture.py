#!/usr/bin/env python3
"""Builds the tiny INT8 digit classifier fixture under data/fixtures/digits.

Trains a 64-32-10 ReLU MLP on scikit-learn's bundled 8x8 digits, quantizes
it to per-tensor symmetric INT8 and writes the model manifest, weight/bias
blobs and the held-out evaluation set. Deterministic for a fixed sklearn.
"""
import json
import pathlib
import sys

import numpy as np
from sklearn.datasets import load_digits
from sklearn.model_selection import train_test_split
from sklearn.neural_network import MLPClassifier


def quantize(x, scale):
    return np.clip(np.round(x / scale), -128, 127).astype(np.int8)


def main(out_dir):
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    digits = load_digits()
    x_train, x_test, y_train, y_test = train_test_split(
        digits.data, digits.target, test_size=0.25, random_state=7, stratify=digits.target)

    mlp = MLPClassifier(hidden_layer_sizes=(32,), activation="relu", max_iter=600, random_state=7)
    mlp.fit(x_train / 16.0, y_train)

    in_scale = 16.0 / 127.0
    w1, b1 = mlp.coefs_[0].T * (1 / 16.0), mlp.intercepts_[0]  # fold the /16 input normalization
    w2, b2 = mlp.coefs_[1].T, mlp.intercepts_[1]

    hidden = np.maximum(x_train @ w1.T + b1, 0)
    hidden_scale = float(np.percentile(hidden, 99.9)) / 127.0

    layers = []
    for name, w, b, s_in, s_out, relu in (("fc1", w1, b1, in_scale, hidden_scale, True),
                                          ("fc2", w2, b2, hidden_scale, 1.0, False)):
        s_w = float(np.abs(w).max()) / 127.0
        (out / f"{name}_w.bin").write_bytes(quantize(w, s_w).tobytes())
        bias = np.round(b / (s_in * s_w)).astype("<i4")
        (out / f"{name}_b.bin").write_bytes(bias.tobytes())
        layers.append({"name": name, "in": int(w.shape[1]), "out": int(w.shape[0]),
                       "weights": f"{name}_w.bin", "bias": f"{name}_b.bin",
                       "input_scale": s_in, "weight_scale": s_w, "output_scale": s_out, "relu": relu})
    (out / "model.json").write_text(json.dumps({"layers": layers}, indent=2) + "\n")

    xq = quantize(x_test, in_scale)
    (out / "inputs.bin").write_bytes(xq.tobytes())
    (out / "inputs.bin.hdr").write_text(f"dtype: int8\nshape: {xq.shape[0]},{xq.shape[1]}\n")
    (out / "labels.csv").write_text("label\n" + "".join(f"{int(v)}\n" for v in y_test))

    print(f"float test accuracy {mlp.score(x_test / 16.0, y_test):.4f}, {len(y_test)} samples")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parents[1] / "data/fixtures/digits")
