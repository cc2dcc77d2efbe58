#pragma once

#include <filesystem>
#include <span>

#include "dipe/ensemble.hpp"
#include "dipe/metrics.hpp"
#include "dipe/parallel.hpp"
#include "dipe/validation_set.hpp"

namespace dipe {

/// Soft plurality vote: pixel-wise mean of the members' probability maps.
/// Summed in double in ascending model index, divided once, so the result is
/// independent of member order.
ProbabilityMap fuse(std::span<const std::size_t> members, std::size_t slice, const ValidationSet& set);

struct EnsembleScore {
  double dice = 0.0;
  double iou = 0.0;

  bool operator==(const EnsembleScore&) const = default;
};

/// Mean Dice/IoU of thresholded fused outputs against ground truth.
EnsembleScore evaluate_ensemble(std::span<const std::size_t> members, const ValidationSet& set,
                                double t = metrics::kDefaultThreshold, const ExecConfig& exec = {});
inline EnsembleScore evaluate_ensemble(const EnsembleSelection& selection, const ValidationSet& set,
                                       double t = metrics::kDefaultThreshold, const ExecConfig& exec = {}) {
  return evaluate_ensemble(selection.members, set, t, exec);
}

/// Writes `<out_dir>/fused.csv` (RLE of thresholded fused masks, every slice)
/// and, if requested, `<out_dir>/<slice_id>.dipe` fused probability maps.
void export_fused(std::span<const std::size_t> members, const ValidationSet& set, double t,
                  const std::filesystem::path& out_dir, bool write_probabilities, const ExecConfig& exec = {});

}  // namespace dipe
