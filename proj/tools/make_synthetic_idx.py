#!/usr/bin/env python3
"""Generate synthetic MNIST-shaped datasets in IDX format.

Writes the conventional filenames (train-images-idx3-ubyte, ...) under
<out>/mnist, <out>/fmnist and <out>/emnist so the loaders and experiment
presets can run without any downloads. mnist/fmnist get structured,
learnable glyph classes at the real sample counts; emnist is a count-exact
stand-in with noise content (62 classes, 697,932 / 116,323 samples).

Real datasets drop in transparently: point --data-dir at a directory with
the original IDX files instead.
"""

import argparse
import gzip
import struct
from pathlib import Path

import numpy as np

SIZE = 28

# Segment endpoints on a coarse 4x4 anchor grid, shared across classes so the
# glyph families overlap (e.g. the "8"-like class contains the "0"-like one).
A = {
    "tl": (5, 5), "tm": (5, 14), "tr": (5, 22),
    "ml": (14, 5), "mm": (14, 14), "mr": (14, 22),
    "bl": (22, 5), "bm": (22, 14), "br": (22, 22),
}

DIGIT_SEGMENTS = [
    ["tl-tr", "tr-br", "br-bl", "bl-tl"],                    # 0: box
    ["tm-bm"],                                               # 1: bar
    ["tl-tr", "tr-mm", "mm-bl", "bl-br"],                    # 2: zigzag
    ["tl-tr", "tr-mm", "mm-br", "br-bl"],                    # 3
    ["tl-ml", "ml-mr", "tm-bm"],                             # 4
    ["tr-tl", "tl-mm", "mm-mr", "mr-br", "br-bl"],           # 5
    ["tr-tl", "tl-bl", "bl-br", "br-mm", "mm-ml"],           # 6
    ["tl-tr", "tr-bm"],                                      # 7
    ["tl-tr", "tr-br", "br-bl", "bl-tl", "ml-mr"],           # 8: box + bar
    ["mr-tl", "tl-tm", "tm-mr", "mr-br"],                    # 9
]

FASHION_SEGMENTS = [
    ["tl-tr", "ml-mr", "bl-br"],                             # stacked bars
    ["tl-bl", "tm-bm", "tr-br"],                             # columns
    ["tl-br", "tr-bl"],                                      # cross
    ["tl-tr", "tr-br", "br-bl"],                             # open box
    ["tm-ml", "ml-bm", "bm-mr", "mr-tm"],                    # diamond
    ["tl-mm", "tr-mm", "mm-bm"],                             # funnel
    ["tl-tr", "tl-bl", "ml-mr"],                             # F shape
    ["bl-tm", "tm-br"],                                      # peak
    ["tl-br", "ml-mr", "tr-bl"],                             # star-ish
    ["tm-bm", "ml-mr", "bl-br"],                             # plus with base
]


def render_template(segments, thickness=1.9):
    rr, cc = np.mgrid[0:SIZE, 0:SIZE].astype(np.float64)
    canvas = np.zeros((SIZE, SIZE))
    for seg in segments:
        p_name, q_name = seg.split("-")
        p = np.array(A[p_name], dtype=np.float64)
        q = np.array(A[q_name], dtype=np.float64)
        d = q - p
        length2 = max((d * d).sum(), 1e-9)
        t = ((rr - p[0]) * d[0] + (cc - p[1]) * d[1]) / length2
        t = np.clip(t, 0.0, 1.0)
        dist = np.hypot(rr - (p[0] + t * d[0]), cc - (p[1] + t * d[1]))
        canvas = np.maximum(canvas, np.clip(1.2 * (thickness - dist), 0.0, 1.0))
    return canvas


def glyph_images(segment_sets, labels, rng):
    """Vectorized rendering: per-sample shift, contrast, noise, occlusion."""
    n = labels.shape[0]
    templates = np.stack([render_template(s) for s in segment_sets])
    shifts = rng.integers(-4, 5, size=(n, 2))
    contrast = rng.uniform(0.8, 1.2, size=n)
    images = np.empty((n, SIZE, SIZE), dtype=np.float64)

    # group samples sharing (class, shift) so each group is one roll + slice
    keys = labels.astype(np.int64) * 128 + (shifts[:, 0] + 4) * 9 + (shifts[:, 1] + 4)
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    boundaries = np.flatnonzero(np.diff(sorted_keys)) + 1
    for group in np.split(order, boundaries):
        g0 = group[0]
        rolled = np.roll(templates[labels[g0]], (shifts[g0, 0], shifts[g0, 1]), axis=(0, 1))
        images[group] = rolled

    images *= contrast[:, None, None]
    images += rng.normal(0.0, 0.10, size=images.shape)

    np.clip(images, 0.0, 1.0, out=images)
    return (images * 255.0).astype(np.uint8)


def balanced_labels(n, classes, rng):
    per = n // classes
    remainder = n - per * classes
    counts = np.full(classes, per)
    counts[:remainder] += 1
    labels = np.repeat(np.arange(classes), counts)
    rng.shuffle(labels)
    return labels.astype(np.uint8)


def write_idx_images(path, images, compress=False):
    header = struct.pack(">4B3I", 0, 0, 8, 3, images.shape[0], SIZE, SIZE)
    payload = header + images.tobytes()
    if compress:
        with gzip.open(str(path) + ".gz", "wb", compresslevel=1) as f:
            f.write(payload)
    else:
        path.write_bytes(payload)


def write_idx_labels(path, labels, compress=False):
    header = struct.pack(">4B1I", 0, 0, 8, 1, labels.shape[0])
    payload = header + labels.astype(np.uint8).tobytes()
    if compress:
        with gzip.open(str(path) + ".gz", "wb", compresslevel=1) as f:
            f.write(payload)
    else:
        path.write_bytes(payload)


def make_glyph_dataset(out_dir, segment_sets, n_train, n_test, seed, compress):
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    for split, n, img_name, lbl_name in [
        ("train", n_train, "train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
        ("test", n_test, "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
    ]:
        labels = balanced_labels(n, len(segment_sets), rng)
        images = glyph_images(segment_sets, labels, rng)
        write_idx_images(out_dir / img_name, images, compress)
        write_idx_labels(out_dir / lbl_name, labels, compress)
        print(f"{out_dir.name}/{split}: {n} samples")


def make_emnist_stand_in(out_dir, seed):
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    for split, n in [("train", 697932), ("test", 116323)]:
        labels = balanced_labels(n, 62, rng)
        images = rng.integers(0, 256, size=(n, SIZE, SIZE), dtype=np.uint8)
        write_idx_images(out_dir / f"emnist-byclass-{split}-images-idx3-ubyte", images)
        write_idx_labels(out_dir / f"emnist-byclass-{split}-labels-idx1-ubyte", labels)
        print(f"emnist/{split}: {n} samples")


def dataset_complete(out, name):
    if name == "emnist":
        files = [out / "emnist" / f"emnist-byclass-{s}-{k}" for s in ("train", "test")
                 for k in ("images-idx3-ubyte", "labels-idx1-ubyte")]
        return all(f.exists() for f in files)
    stems = ["train-images-idx3-ubyte", "train-labels-idx1-ubyte",
             "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"]
    return all((out / name / s).exists() or (out / name / (s + ".gz")).exists()
               for s in stems)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="data directory to populate")
    parser.add_argument("--seed", type=int, default=9)
    parser.add_argument("--datasets", nargs="+", default=["mnist", "fmnist", "emnist"],
                        choices=["mnist", "fmnist", "emnist"])
    parser.add_argument("--skip-existing", action="store_true",
                        help="leave datasets whose files are already present untouched")
    args = parser.parse_args()

    out = Path(args.out)
    wanted = [d for d in args.datasets
              if not (args.skip_existing and dataset_complete(out, d))]
    for d in args.datasets:
        if d not in wanted:
            print(f"{d}: already present, skipped")
    if "mnist" in wanted:
        make_glyph_dataset(out / "mnist", DIGIT_SEGMENTS, 60000, 10000, args.seed,
                           compress=False)
    if "fmnist" in wanted:
        # gzipped on purpose: exercises the transparent-decompression path
        make_glyph_dataset(out / "fmnist", FASHION_SEGMENTS, 60000, 10000, args.seed + 1,
                           compress=True)
    if "emnist" in wanted:
        make_emnist_stand_in(out / "emnist", args.seed + 2)


if __name__ == "__main__":
    main()
