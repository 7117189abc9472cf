#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "dermakit/error.hpp"
#include "dermakit/npy.hpp"

namespace dermakit {

inline constexpr int kNumClasses = 7;
inline constexpr int kImageSize = 28;

struct ClassInfo {
  int index;
  const char* acronym;
  const char* full_name;
};

/// Class ids follow the archive's label encoding.
inline constexpr std::array<ClassInfo, kNumClasses> kClasses{{
    {0, "AK", "Actinic Keratoses"},
    {1, "BC", "Basal Cell Carcinoma"},
    {2, "BK", "Benign Keratosis-like Lesions"},
    {3, "DF", "Dermatofibroma"},
    {4, "ME", "Melanoma"},
    {5, "MN", "Melanocytic Nevi"},
    {6, "VL", "Vascular Lesions"},
}};

enum class Split { train, val, test };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "";
}

/// One split of 28x28 8-bit images with class labels 0..6. Channel count
/// is 3 as loaded; 2 after channel dropping.
struct ImageSet {
  Split split = Split::train;
  int channels = 3;
  std::vector<std::uint8_t> pixels;  // N x 28 x 28 x C, row-major
  std::vector<std::uint8_t> labels;  // N class ids

  std::int64_t count() const { return static_cast<std::int64_t>(labels.size()); }

  std::size_t image_bytes() const {
    return static_cast<std::size_t>(kImageSize) * kImageSize *
           static_cast<std::size_t>(channels);
  }

  std::span<const std::uint8_t> image(std::int64_t i) const {
    return {pixels.data() + static_cast<std::size_t>(i) * image_bytes(),
            image_bytes()};
  }

  void validate() const {
    if (pixels.size() != static_cast<std::size_t>(count()) * image_bytes())
      fail(ErrorKind::ShapeMismatch, "pixel buffer does not match label count");
    if (channels != 2 && channels != 3)
      fail(ErrorKind::ShapeMismatch, "channel count must be 2 or 3");
    for (auto l : labels)
      if (l >= kNumClasses)
        fail(ErrorKind::LabelOutOfRange, "label " + std::to_string(l));
  }
};

struct Dataset {
  ImageSet train, val, test;
};

namespace dataset_detail {

inline std::vector<std::uint8_t> flatten_labels(const NdArray& arr,
                                                const std::string& key) {
  // Accepted as rank-1 or rank-(N,1); normalized to rank-1.
  if (!(arr.shape.size() == 1 ||
        (arr.shape.size() == 2 && arr.shape[1] == 1)))
    fail(ErrorKind::ShapeMismatch, key + ": labels must be (N) or (N,1)");
  const std::int64_t n = arr.shape[0];
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(n));
  if (arr.dtype == Dtype::U8) {
    for (auto v : arr.as<std::uint8_t>()) {
      if (v >= kNumClasses)
        fail(ErrorKind::LabelOutOfRange, key + ": label " + std::to_string(v));
      out.push_back(v);
    }
  } else if (arr.dtype == Dtype::I32) {
    for (auto v : arr.as<std::int32_t>()) {
      if (v < 0 || v >= kNumClasses)
        fail(ErrorKind::LabelOutOfRange, key + ": label " + std::to_string(v));
      out.push_back(static_cast<std::uint8_t>(v));
    }
  } else {
    fail(ErrorKind::UnsupportedDtype, key + ": labels must be uint8 or int32");
  }
  return out;
}

inline ImageSet build_split(Split split, const NdArray& images,
                            const NdArray& labels, const std::string& img_key,
                            const std::string& lbl_key) {
  if (images.dtype != Dtype::U8)
    fail(ErrorKind::UnsupportedDtype, img_key + ": images must be uint8");
  if (images.fortran_order)
    fail(ErrorKind::ShapeMismatch, img_key + ": fortran-order images unsupported");
  if (images.shape.size() != 4 || images.shape[1] != kImageSize ||
      images.shape[2] != kImageSize || images.shape[3] != 3)
    fail(ErrorKind::ShapeMismatch, img_key + ": expected (N, 28, 28, 3)");

  ImageSet set;
  set.split = split;
  set.channels = 3;
  set.labels = flatten_labels(labels, lbl_key);
  if (images.shape[0] != static_cast<std::int64_t>(set.labels.size()))
    fail(ErrorKind::ShapeMismatch,
         img_key + ": image count " + std::to_string(images.shape[0]) +
             " != label count " + std::to_string(set.labels.size()));
  set.pixels = images.data;
  set.validate();
  return set;
}

}  // namespace dataset_detail

inline std::vector<std::uint8_t> read_file_bytes(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::IoFailure, "read error on " + path.string());
  return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path,
                             std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoFailure, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::IoFailure, "write error on " + path.string());
}

inline Dataset load_dataset_from_bytes(std::span<const std::uint8_t> bytes) {
  const auto entries = parse_npz(bytes);
  auto get = [&](const std::string& key) -> const NdArray& {
    auto it = entries.find(key);
    if (it == entries.end()) fail(ErrorKind::MissingKey, key);
    return it->second;
  };
  Dataset ds;
  ds.train = dataset_detail::build_split(Split::train, get("train_images"),
                                         get("train_labels"), "train_images",
                                         "train_labels");
  ds.val = dataset_detail::build_split(Split::val, get("val_images"),
                                       get("val_labels"), "val_images",
                                       "val_labels");
  ds.test = dataset_detail::build_split(Split::test, get("test_images"),
                                        get("test_labels"), "test_images",
                                        "test_labels");
  return ds;
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  return load_dataset_from_bytes(read_file_bytes(path));
}

/// Re-export helpers so reduced training sets can round-trip through the
/// same container format they were loaded from.
inline std::vector<std::pair<std::string, NdArray>> imageset_to_arrays(
    const ImageSet& set, const std::string& prefix) {
  NdArray images = NdArray::make(
      Dtype::U8, {set.count(), kImageSize, kImageSize, set.channels});
  images.data = set.pixels;
  NdArray labels = NdArray::make(Dtype::U8, {set.count(), 1});
  labels.data = set.labels;
  return {{prefix + "_images", std::move(images)},
          {prefix + "_labels", std::move(labels)}};
}

}  // namespace dermakit
