#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dipe/manifest.hpp"
#include "dipe/tensor.hpp"
#include "dipe/validation_set.hpp"

namespace dipe::synth {

struct ModelSpec {
  std::string model_id;
  std::string name;
  /// Flip probability for pixels on an object boundary, in [0, 0.5).
  double noise_rate = 0.0;
  /// Models sharing a tag share part of their error field.
  std::int64_t correlation_group = 0;
};

/// Everything that determines a generated validation set. The generation
/// scheme is documented in docs/synth.md.
struct SynthSpec {
  std::uint64_t seed = 0;
  std::size_t slices = 1;
  Shape dims{3, 64, 64};
  std::vector<std::string> class_names;  // defaults to class_0..class_{C-1}
  /// Share of a model's flip budget drawn from its group's field.
  double shared_fraction = 0.6;
  /// Probability that a slice is pure background.
  double empty_fraction = 0.25;
  /// Width in pixels of the boundary band where errors occur.
  double boundary_width = 2.0;
  std::vector<ModelSpec> models;
};

/// Throws ContractError on an invalid spec.
void validate(const SynthSpec& spec);

SynthSpec spec_from_json(const std::string& text);
std::string spec_to_json(const SynthSpec& spec);

/// Builds the whole set in memory.
ValidationSet generate_in_memory(const SynthSpec& spec);

/// Writes manifest.json, truth.csv and preds/<model_id>/<slice_id>.dipe under
/// `out_dir`; byte-identical for identical specs. Returns the manifest.
Manifest generate(const SynthSpec& spec, const std::filesystem::path& out_dir);

/// Counter-based generator primitives, exposed for the docs' test vectors.
std::uint64_t mix64(std::uint64_t x) noexcept;
double uniform(std::uint64_t seed, std::initializer_list<std::uint64_t> key) noexcept;

}  // namespace dipe::synth
