#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dipe/metrics.hpp"
#include "dipe/parallel.hpp"
#include "dipe/validation_set.hpp"

namespace dipe {

/// Symmetric n x n matrix of mean pairwise Dice between thresholded model
/// outputs. Diagonal is exactly 1.
class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;
  /// Throws ContractError unless `values` is a valid correlation matrix.
  CorrelationMatrix(std::vector<std::string> model_ids, std::vector<double> values);

  std::size_t size() const noexcept { return model_ids_.size(); }
  const std::vector<std::string>& model_ids() const noexcept { return model_ids_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * size() + j]; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool operator==(const CorrelationMatrix&) const = default;

 private:
  std::vector<std::string> model_ids_;
  std::vector<double> values_;
};

/// Mean over evaluated slices of dice(threshold(Y_i), threshold(Y_j)).
double pairwise_dice(std::size_t i, std::size_t j, const ValidationSet& set,
                     double t = metrics::kDefaultThreshold);

CorrelationMatrix correlation_matrix(const ValidationSet& set, double t = metrics::kDefaultThreshold,
                                     const ExecConfig& exec = {});

/// First row model ids, then one row of %.17g values per model.
std::string correlation_to_csv(const CorrelationMatrix& c);
CorrelationMatrix correlation_from_csv(const std::string& text);

/// Binary PGM, one 8-bit pixel per cell, brightness linear over [min, 1].
std::vector<std::uint8_t> correlation_to_pgm(const CorrelationMatrix& c);

/// Writes `csv_path` and a sibling `.pgm`.
void export_heatmap(const CorrelationMatrix& c, const std::filesystem::path& csv_path);

}  // namespace dipe
