#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chnnet/activations.hpp"
#include "chnnet/matrix.hpp"

namespace chn {

// Raw image tensor as stored in an IDX file: count x rows x cols unsigned
// bytes, row-major per image.
struct RawImages {
    std::uint32_t count = 0;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::uint8_t> pixels;
};

// IDX parsers. Both transparently decompress gzip files (magic 0x1f 0x8b).
// Format errors name the expected and found magic bytes; truncated files
// raise a length error.
RawImages load_idx_images(const std::string& path);
Labels load_idx_labels(const std::string& path);

// Flattens each image row-major into a column scaled to [0, 1] by 255.
Matrix normalize(const RawImages& images);

struct Dataset {
    Matrix features;  // d x N, d = rows * cols
    Labels labels;    // length N
    int num_classes = 0;
};

// Bundles features and labels, validating the Dataset invariants (length
// agreement, feature range, label range).
Dataset assemble_dataset(const RawImages& images, Labels labels, int num_classes);

// Loads one split of a named dataset ("mnist" | "fmnist" | "emnist") from a
// data directory. Looks for the conventional filenames under
// <dir>/<name>/ first and then <dir>/ flat, each with an optional .gz suffix.
Dataset load_dataset(const std::string& data_dir, const std::string& name, bool train);

// Raw variant of load_dataset for when only counts/shapes are needed and the
// split is too large to keep as doubles.
std::pair<RawImages, Labels> load_dataset_raw(const std::string& data_dir,
                                              const std::string& name, bool train);

// First n samples of a seeded uniform shuffle; deterministic per seed.
Dataset subset(const Dataset& ds, std::size_t n, std::uint64_t seed);

struct BatchPlan {
    std::size_t batch_size = 1;
    std::uint64_t seed = 0;
    bool drop_last = false;
};

struct Batch {
    Matrix x;
    Labels y;
};

// Seeded per-epoch reshuffle; the final short batch is kept unless drop_last.
std::vector<Batch> batches(const Dataset& ds, const BatchPlan& plan, std::uint64_t epoch);

int dataset_num_classes(const std::string& name);

}  // namespace chn
