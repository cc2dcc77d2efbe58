#pragma once

#include <span>

#include "dipe/correlation.hpp"
#include "dipe/fusion.hpp"
#include "dipe/metrics.hpp"
#include "dipe/validation_set.hpp"

// Single-threaded versions of the OpenMP kernels. They follow the same
// reduction order, so results must match the parallel kernels bit for bit.
namespace dipe::reference {

metrics::ModelScores score_models(const ValidationSet& set, double t = metrics::kDefaultThreshold);
CorrelationMatrix correlation_matrix(const ValidationSet& set, double t = metrics::kDefaultThreshold);
EnsembleScore evaluate_ensemble(std::span<const std::size_t> members, const ValidationSet& set,
                                double t = metrics::kDefaultThreshold);

}  // namespace dipe::reference
