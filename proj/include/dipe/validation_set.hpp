#pragma once

#include <span>
#include <string>
#include <vector>

#include "dipe/manifest.hpp"
#include "dipe/parallel.hpp"
#include "dipe/tensor.hpp"

namespace dipe {

/// Everything the pipeline reads from disk, held in memory: ground truth per
/// slice and every model's probability map per slice. Immutable once built.
class ValidationSet {
 public:
  struct Slice {
    std::string id;
    BinaryMaskSet truth;
    bool include = true;
  };

  /// `predictions[m][s]` is model m's output on slice s.
  ValidationSet(std::vector<std::string> model_ids, std::vector<std::string> class_names, std::vector<Slice> slices,
                std::vector<std::vector<ProbabilityMap>> predictions);

  /// Reads every tensor named by a validated manifest, concurrently.
  static ValidationSet load(const Manifest& manifest, const ExecConfig& exec = {});

  std::size_t model_count() const noexcept { return model_ids_.size(); }
  std::size_t slice_count() const noexcept { return slices_.size(); }
  const std::vector<std::string>& model_ids() const noexcept { return model_ids_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  const Slice& slice(std::size_t s) const { return slices_.at(s); }
  const BinaryMaskSet& truth(std::size_t s) const { return slices_.at(s).truth; }
  const ProbabilityMap& prediction(std::size_t model, std::size_t s) const { return predictions_.at(model).at(s); }

  /// Indices of slices that take part in averages, ascending.
  std::span<const std::size_t> evaluated_slices() const noexcept { return evaluated_; }

  std::size_t model_index(const std::string& model_id) const;

  /// Same predictions scored against a different ground truth.
  ValidationSet with_truth(std::vector<BinaryMaskSet> truth) const;
  /// Subset / reordering / duplication of models.
  ValidationSet with_models(std::span<const std::size_t> models) const;

 private:
  std::vector<std::string> model_ids_;
  std::vector<std::string> class_names_;
  std::vector<Slice> slices_;
  std::vector<std::vector<ProbabilityMap>> predictions_;
  std::vector<std::size_t> evaluated_;
};

}  // namespace dipe
