#include "chnnet/idx.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "chnnet/rng.hpp"

namespace chn {

namespace {

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

bool is_gzip(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& bytes,
                                 const std::string& path) {
    z_stream strm{};
    // 15 + 32: zlib auto-detects the gzip wrapper.
    if (inflateInit2(&strm, 15 + 32) != Z_OK) {
        throw std::runtime_error("zlib init failed for " + path);
    }
    std::vector<std::uint8_t> out;
    out.reserve(bytes.size() * 3);
    std::vector<std::uint8_t> chunk(1 << 20);
    strm.next_in = const_cast<Bytef*>(bytes.data());
    strm.avail_in = static_cast<uInt>(bytes.size());
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        strm.next_out = chunk.data();
        strm.avail_out = static_cast<uInt>(chunk.size());
        rc = inflate(&strm, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&strm);
            throw std::runtime_error("gzip decompression failed for " + path);
        }
        out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - strm.avail_out));
    }
    inflateEnd(&strm);
    return out;
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset) {
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[offset + 3]);
}

std::string hex_bytes(const std::uint8_t* p, std::size_t n) {
    std::string s;
    char buf[8];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof(buf), "%s0x%02x", i ? " " : "", p[i]);
        s += buf;
    }
    return s;
}

void check_magic(const std::vector<std::uint8_t>& bytes, const std::uint8_t expected[4],
                 const std::string& path) {
    if (bytes.size() < 4) {
        throw std::runtime_error(path + ": truncated IDX header (" +
                                 std::to_string(bytes.size()) + " bytes)");
    }
    if (!std::equal(expected, expected + 4, bytes.begin())) {
        throw std::runtime_error(path + ": bad IDX magic, expected " + hex_bytes(expected, 4) +
                                 ", found " + hex_bytes(bytes.data(), 4));
    }
}

std::vector<std::uint8_t> load_payload(const std::string& path) {
    std::vector<std::uint8_t> bytes = read_file_bytes(path);
    if (is_gzip(bytes)) return gunzip(bytes, path);
    return bytes;
}

std::string resolve_idx_file(const std::string& data_dir, const std::string& name,
                             const std::string& filename) {
    namespace fs = std::filesystem;
    const std::string candidates[] = {
        data_dir + "/" + name + "/" + filename,
        data_dir + "/" + name + "/" + filename + ".gz",
        data_dir + "/" + filename,
        data_dir + "/" + filename + ".gz",
    };
    for (const auto& c : candidates) {
        if (fs::exists(c)) return c;
    }
    throw std::runtime_error("missing data file: " + candidates[0] + " (also tried .gz and " +
                             data_dir + "/" + filename + ")");
}

Matrix gather_columns(const Matrix& src, const std::vector<std::size_t>& idx) {
    Matrix out(src.rows(), idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const std::size_t s = idx[j];
        for (std::size_t i = 0; i < src.rows(); ++i) out(i, j) = src(i, s);
    }
    return out;
}

}  // namespace

RawImages load_idx_images(const std::string& path) {
    static const std::uint8_t kMagic[4] = {0x00, 0x00, 0x08, 0x03};
    const std::vector<std::uint8_t> bytes = load_payload(path);
    check_magic(bytes, kMagic, path);
    if (bytes.size() < 16) {
        throw std::runtime_error(path + ": truncated IDX image header (" +
                                 std::to_string(bytes.size()) + " bytes)");
    }
    RawImages img;
    img.count = read_be32(bytes, 4);
    img.rows = read_be32(bytes, 8);
    img.cols = read_be32(bytes, 12);
    const std::size_t expected =
        16 + static_cast<std::size_t>(img.count) * img.rows * img.cols;
    if (bytes.size() != expected) {
        throw std::runtime_error(path + ": expected " + std::to_string(expected) +
                                 " bytes for " + std::to_string(img.count) + " images, found " +
                                 std::to_string(bytes.size()));
    }
    img.pixels.assign(bytes.begin() + 16, bytes.end());
    return img;
}

Labels load_idx_labels(const std::string& path) {
    static const std::uint8_t kMagic[4] = {0x00, 0x00, 0x08, 0x01};
    const std::vector<std::uint8_t> bytes = load_payload(path);
    check_magic(bytes, kMagic, path);
    if (bytes.size() < 8) {
        throw std::runtime_error(path + ": truncated IDX label header (" +
                                 std::to_string(bytes.size()) + " bytes)");
    }
    const std::uint32_t count = read_be32(bytes, 4);
    if (bytes.size() != 8 + static_cast<std::size_t>(count)) {
        throw std::runtime_error(path + ": expected " + std::to_string(8 + count) +
                                 " bytes for " + std::to_string(count) + " labels, found " +
                                 std::to_string(bytes.size()));
    }
    Labels labels;
    labels.values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        labels.values.push_back(static_cast<int>(bytes[8 + i]));
    }
    return labels;
}

Matrix normalize(const RawImages& images) {
    const std::size_t d = static_cast<std::size_t>(images.rows) * images.cols;
    Matrix out(d, images.count);
    for (std::size_t n = 0; n < images.count; ++n) {
        const std::uint8_t* px = images.pixels.data() + n * d;
        for (std::size_t k = 0; k < d; ++k) {
            out(k, n) = static_cast<double>(px[k]) / 255.0;
        }
    }
    return out;
}

Dataset assemble_dataset(const RawImages& images, Labels labels, int num_classes) {
    if (labels.size() != images.count) {
        throw std::runtime_error("dataset: " + std::to_string(images.count) + " images but " +
                                 std::to_string(labels.size()) + " labels");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels.values[i] < 0 || labels.values[i] >= num_classes) {
            throw std::runtime_error("dataset: label " + std::to_string(labels.values[i]) +
                                     " at sample " + std::to_string(i) + " not in [0, " +
                                     std::to_string(num_classes) + ")");
        }
    }
    Dataset ds;
    ds.features = normalize(images);
    ds.labels = std::move(labels);
    ds.num_classes = num_classes;
    return ds;
}

int dataset_num_classes(const std::string& name) {
    if (name == "mnist" || name == "fmnist") return 10;
    if (name == "emnist") return 62;
    throw std::runtime_error("unknown dataset '" + name + "' (expected mnist|fmnist|emnist)");
}

std::pair<RawImages, Labels> load_dataset_raw(const std::string& data_dir,
                                              const std::string& name, bool train) {
    std::string img_file;
    std::string lbl_file;
    if (name == "emnist") {
        const std::string split = train ? "train" : "test";
        img_file = "emnist-byclass-" + split + "-images-idx3-ubyte";
        lbl_file = "emnist-byclass-" + split + "-labels-idx1-ubyte";
    } else if (name == "mnist" || name == "fmnist") {
        img_file = train ? "train-images-idx3-ubyte" : "t10k-images-idx3-ubyte";
        lbl_file = train ? "train-labels-idx1-ubyte" : "t10k-labels-idx1-ubyte";
    } else {
        throw std::runtime_error("unknown dataset '" + name + "' (expected mnist|fmnist|emnist)");
    }
    RawImages images = load_idx_images(resolve_idx_file(data_dir, name, img_file));
    Labels labels = load_idx_labels(resolve_idx_file(data_dir, name, lbl_file));
    return {std::move(images), std::move(labels)};
}

Dataset load_dataset(const std::string& data_dir, const std::string& name, bool train) {
    auto [images, labels] = load_dataset_raw(data_dir, name, train);
    return assemble_dataset(images, std::move(labels), dataset_num_classes(name));
}

Dataset subset(const Dataset& ds, std::size_t n, std::uint64_t seed) {
    const std::size_t total = ds.features.cols();
    if (n > total) {
        throw std::invalid_argument("subset: requested " + std::to_string(n) + " of " +
                                    std::to_string(total) + " samples");
    }
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(mix_seed(seed, RngPurpose::Subset));
    rng.shuffle(idx);
    idx.resize(n);

    Dataset out;
    out.features = gather_columns(ds.features, idx);
    out.labels.values.reserve(n);
    for (std::size_t j : idx) out.labels.values.push_back(ds.labels.values[j]);
    out.num_classes = ds.num_classes;
    return out;
}

std::vector<Batch> batches(const Dataset& ds, const BatchPlan& plan, std::uint64_t epoch) {
    const std::size_t total = ds.features.cols();
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(mix_seed(plan.seed, RngPurpose::Shuffle, epoch));
    rng.shuffle(idx);

    std::vector<Batch> out;
    for (std::size_t start = 0; start < total; start += plan.batch_size) {
        const std::size_t len = std::min(plan.batch_size, total - start);
        if (len < plan.batch_size && plan.drop_last) break;
        const std::vector<std::size_t> slice(idx.begin() + start, idx.begin() + start + len);
        Batch b;
        b.x = gather_columns(ds.features, slice);
        b.y.values.reserve(len);
        for (std::size_t j : slice) b.y.values.push_back(ds.labels.values[j]);
        out.push_back(std::move(b));
    }
    return out;
}

}  // namespace chn
