#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dipe/parallel.hpp"
#include "dipe/tensor.hpp"
#include "dipe/validation_set.hpp"

namespace dipe::metrics {

inline constexpr double kDefaultThreshold = 0.5;

/// Pixel counts for one class plane pair.
struct OverlapCounts {
  std::uint64_t intersection = 0;
  std::uint64_t first = 0;
  std::uint64_t second = 0;
};

OverlapCounts count_overlap(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

// Both planes empty scores 1.0 (agreement on background).
double dice(const OverlapCounts& counts) noexcept;
double iou(const OverlapCounts& counts) noexcept;

struct SliceScore {
  double dice = 0.0;
  double iou = 0.0;
};

/// Unweighted mean over classes, accumulated in class order.
SliceScore score_slice(const BinaryMaskSet& a, const BinaryMaskSet& b);
double dice(const BinaryMaskSet& a, const BinaryMaskSet& b);
double iou(const BinaryMaskSet& a, const BinaryMaskSet& b);

/// plane[c][p] = 1 iff map[c][p] >= t. Throws ContractError unless 0 < t < 1.
BinaryMaskSet threshold(const ProbabilityMap& map, double t);
void check_threshold(double t);

/// Sum in index order, divided once.
double ordered_mean(std::span<const double> values);

/// D = {d_1..d_n}: per-model validation Dice (and IoU), manifest order.
struct ModelScores {
  std::vector<std::string> model_ids;
  std::vector<double> dice;
  std::vector<double> iou;

  std::size_t size() const noexcept { return dice.size(); }
};

ModelScores score_models(const ValidationSet& set, double t = kDefaultThreshold, const ExecConfig& exec = {});

/// {"<model_id>": {"dice": x, "iou": y}, ...} in model order, numbers as %.17g.
std::string scores_to_json(const ModelScores& scores);
ModelScores scores_from_json(const std::string& text);

/// Decimal rendering that round-trips a double exactly.
std::string format_double(double v);

}  // namespace dipe::metrics
