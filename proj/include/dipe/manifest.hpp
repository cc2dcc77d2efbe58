#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dipe/parallel.hpp"
#include "dipe/tensor.hpp"

namespace dipe {

struct SliceEntry {
  std::string id;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  /// RLE CSV holding this slice's ground truth, relative to the manifest.
  std::filesystem::path truth_file;
  /// Value of the CSV `id` column for this slice's rows.
  std::string truth_id;
  /// Excluded slices are loaded and validated but left out of every average.
  bool include = true;
};

struct ModelEntry {
  std::string model_id;
  std::string name;
  std::filesystem::path pred_dir;
};

/// Binds the model pool to its stored validation outputs.
///
/// JSON layout:
///   {"class_names": [...],
///    "slices": [{"id", "height", "width",
///                "truth_rle_row_refs": {"file": "truth.csv", "id": "<csv id>"},
///                "include": true}],
///    "models": [{"model_id", "name", "pred_dir"}]}
/// `include` is optional. Relative paths resolve against the manifest's
/// directory; model m's prediction for slice s is `<pred_dir>/<s>.dipe`.
struct Manifest {
  std::filesystem::path base_dir;
  std::vector<std::string> class_names;
  std::vector<SliceEntry> slices;
  std::vector<ModelEntry> models;

  std::filesystem::path prediction_path(std::size_t model, std::size_t slice) const;
  std::filesystem::path truth_path(std::size_t slice) const;
  Shape slice_shape(std::size_t slice) const;
};

/// Schema-level parse only; no file access.
Manifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir);
std::string manifest_to_json(const Manifest& manifest);

/// Parses and validates: unique ids, every prediction present with the
/// slice's (C, H, W), every truth file readable.
Manifest load_manifest(const std::filesystem::path& path);

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Reads and validates all ground-truth masks of `manifest`, in slice order.
std::vector<BinaryMaskSet> load_ground_truth(const Manifest& manifest);

}  // namespace dipe
