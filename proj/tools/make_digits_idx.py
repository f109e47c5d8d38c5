#!/usr/bin/env python3
"""Generate a desk-scale handwritten-digit corpus in MNIST IDX format.

Upscales the bundled scikit-learn digits (1797 real 8x8 handwritten digit
images) to 28x28 and augments them with small shifts and pixel noise to the
requested split sizes. Train/val/test draw from disjoint base images. The
output files are drop-in replacements for the canonical MNIST IDX files; if
you have real MNIST, point the config at those instead.
"""

import argparse
import os
import struct

import numpy as np
from scipy import ndimage
from sklearn import datasets


def write_idx_images(path, images):
    n, rows, cols = images.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, n, rows, cols))
        f.write(images.astype(np.uint8).tobytes())


def write_idx_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


def augment(base_images, base_labels, count, rng):
    out_images = np.zeros((count, 28, 28), dtype=np.uint8)
    out_labels = np.zeros(count, dtype=np.uint8)
    for i in range(count):
        j = rng.integers(len(base_images))
        img = base_images[j]
        dx, dy = rng.integers(-2, 3, size=2)
        img = np.roll(np.roll(img, dx, axis=1), dy, axis=0)
        img = img + rng.normal(0.0, 8.0, size=img.shape)
        out_images[i] = np.clip(img, 0, 255).astype(np.uint8)
        out_labels[i] = base_labels[j]
    return out_images, out_labels


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--n-train", type=int, default=5000)
    parser.add_argument("--n-val", type=int, default=1000)
    parser.add_argument("--n-test", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    digits = datasets.load_digits()
    images = digits.images / 16.0  # to [0,1]
    # 8x8 -> 28x28 bilinear upscale, back to byte range.
    upscaled = np.stack(
        [ndimage.zoom(img, 3.5, order=1) for img in images]
    )
    upscaled = np.clip(upscaled * 255.0, 0, 255)
    labels = digits.target

    rng = np.random.default_rng(args.seed)
    order = rng.permutation(len(upscaled))
    n_train_base = int(len(order) * 0.6)
    n_val_base = int(len(order) * 0.2)
    pools = {
        "train": order[:n_train_base],
        "val": order[n_train_base : n_train_base + n_val_base],
        "test": order[n_train_base + n_val_base :],
    }
    counts = {"train": args.n_train, "val": args.n_val, "test": args.n_test}

    os.makedirs(args.out, exist_ok=True)
    for split, pool in pools.items():
        imgs, labs = augment(upscaled[pool], labels[pool], counts[split], rng)
        write_idx_images(os.path.join(args.out, f"{split}-images-idx3-ubyte"), imgs)
        write_idx_labels(os.path.join(args.out, f"{split}-labels-idx1-ubyte"), labs)
        print(f"{split}: {counts[split]} samples from {len(pool)} base digits")


if __name__ == "__main__":
    main()
