#pragma once

#include <span>
#include <string>
#include <vector>

#include "dipe/correlation.hpp"
#include "dipe/ensemble.hpp"
#include "dipe/fusion.hpp"
#include "dipe/parallel.hpp"
#include "dipe/validation_set.hpp"

namespace dipe {

/// Largest pool the exhaustive oracle accepts.
inline constexpr std::size_t kMaxExhaustiveModels = 12;

/// Score for adding candidate `i` to `ensemble`: the mean over members j of
/// ((1 - d_i) + C[i][j]). Lower is better. Throws ContractError if `i` is
/// already a member or the ensemble is empty.
SelectionScore avg_score(std::size_t i, std::span<const std::size_t> ensemble, const CorrelationMatrix& c,
                         std::span<const double> d);

/// Same quantity evaluated as (1 - d_i) + mean_j C[i][j].
double avg_score_factored(std::size_t i, std::span<const std::size_t> ensemble, const CorrelationMatrix& c,
                          std::span<const double> d);

/// Ablated score: mean_j C[i][j], accuracy term dropped.
SelectionScore avg_correlation(std::size_t i, std::span<const std::size_t> ensemble, const CorrelationMatrix& c);

/// Greedy diversity-promoting selection. Starts from argmax d (lowest index on
/// ties), then repeatedly adds the candidate with the smallest avg_score,
/// scanning candidates in ascending index. A candidate replaces the current
/// best if its score is strictly lower, or equal with strictly higher d.
/// Comparisons are exact. Requires 1 <= k <= n.
EnsembleSelection select_dipe(const CorrelationMatrix& c, std::span<const double> d, std::size_t k);

/// select_dipe with avg_correlation as the step score.
EnsembleSelection select_dipe_ablated(const CorrelationMatrix& c, std::span<const double> d, std::size_t k);

/// k highest d, ties to the lower index; members ordered by rank.
EnsembleSelection select_topk(std::span<const double> d, std::size_t k);

EnsembleSelection select_all(std::size_t n);

/// Size-k subset with the highest fused validation Dice; ties go to the
/// lexicographically smallest index set. Refuses pools above
/// kMaxExhaustiveModels.
EnsembleSelection select_exhaustive(const ValidationSet& set, std::size_t k, double t = metrics::kDefaultThreshold,
                                    const ExecConfig& exec = {});

/// Strategy dispatch for the matrix-only strategies (everything except
/// exhaustive). `k` is ignored for Strategy::all.
EnsembleSelection select(Strategy strategy, const CorrelationMatrix& c, std::span<const double> d, std::size_t k);

/// {"strategy", "k", "members": [ids], "trace": [...]}.
std::string selection_to_json(const EnsembleSelection& selection, std::span<const std::string> model_ids);
/// Reads the member ids back as indices into `model_ids`.
EnsembleSelection selection_from_json(const std::string& text, std::span<const std::string> model_ids);

}  // namespace dipe
