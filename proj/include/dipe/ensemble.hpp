#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dipe {

enum class Strategy { dipe, dipe_ablated, topk, all, exhaustive };

std::string_view to_string(Strategy s) noexcept;
/// Accepts the canonical names plus the CLI spelling "dipe-ablated".
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

/// Score of one candidate at one greedy step.
struct SelectionScore {
  std::size_t candidate = 0;
  double value = 0.0;
};

/// Candidates evaluated at one greedy step, ascending index, and the winner.
struct SelectionStep {
  std::vector<SelectionScore> candidates;
  std::size_t chosen = 0;
};

/// Members in order of addition, plus the strategy and budget that produced
/// them. `trace` is filled by the greedy strategies only.
struct EnsembleSelection {
  std::vector<std::size_t> members;
  Strategy strategy = Strategy::dipe;
  std::size_t k = 0;
  std::vector<SelectionStep> trace;
};

}  // namespace dipe
