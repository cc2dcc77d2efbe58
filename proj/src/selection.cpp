#include "dipe/selection.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "dipe/error.hpp"
#include "json.hpp"

namespace dipe {

namespace {

void check_budget(std::size_t k, std::size_t n) {
  if (k < 1 || k > n) {
    throw ContractError("k out of range: k = " + std::to_string(k) + ", expected 1 <= k <= " + std::to_string(n));
  }
}

void check_inputs(const CorrelationMatrix& c, std::span<const double> d) {
  if (c.size() != d.size()) {
    throw ContractError("correlation matrix has " + std::to_string(c.size()) + " models but " +
                        std::to_string(d.size()) + " scores were given");
  }
}

void check_candidate(std::size_t i, std::span<const std::size_t> ensemble, std::size_t n) {
  if (ensemble.empty()) throw ContractError("ensemble must be non-empty");
  if (i >= n) throw ContractError("candidate index out of range");
  if (std::find(ensemble.begin(), ensemble.end(), i) != ensemble.end()) {
    throw ContractError("candidate " + std::to_string(i) + " is already in the ensemble");
  }
}

std::size_t argmax_lowest(std::span<const double> d) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.size(); ++i)
    if (d[i] > d[best]) best = i;
  return best;
}

template <class StepScore>
EnsembleSelection greedy(Strategy strategy, const CorrelationMatrix& c, std::span<const double> d, std::size_t k,
                         StepScore&& step_score) {
  check_inputs(c, d);
  const std::size_t n = d.size();
  check_budget(k, n);

  EnsembleSelection out;
  out.strategy = strategy;
  out.k = k;
  out.members.push_back(argmax_lowest(d));
  std::vector<bool> taken(n, false);
  taken[out.members.front()] = true;

  while (out.members.size() < k) {
    SelectionStep step;
    std::size_t chosen = 0;
    double best = std::numeric_limits<double>::infinity();
    double best_perf = 0.0;
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const SelectionScore score = step_score(i, out.members);
      step.candidates.push_back(score);
      if (!found || score.value < best || (score.value == best && d[i] > best_perf)) {
        chosen = i;
        best = score.value;
        best_perf = d[i];
        found = true;
      }
    }
    step.chosen = chosen;
    out.trace.push_back(std::move(step));
    out.members.push_back(chosen);
    taken[chosen] = true;
  }
  return out;
}

}  // namespace

SelectionScore avg_score(std::size_t i, std::span<const std::size_t> ensemble, const CorrelationMatrix& c,
                         std::span<const double> d) {
  check_inputs(c, d);
  check_candidate(i, ensemble, c.size());
  const double error = 1.0 - d[i];
  double sum = 0.0;
  for (std::size_t j : ensemble) sum += error + c(i, j);
  return {i, sum / static_cast<double>(ensemble.size())};
}

double avg_score_factored(std::size_t i, std::span<const std::size_t> ensemble, const CorrelationMatrix& c,
                          std::span<const double> d) {
  check_inputs(c, d);
  return (1.0 - d[i]) + avg_correlation(i, ensemble, c).value;
}

SelectionScore avg_correlation(std::size_t i, std::span<const std::size_t> ensemble, const CorrelationMatrix& c) {
  check_candidate(i, ensemble, c.size());
  double sum = 0.0;
  for (std::size_t j : ensemble) sum += c(i, j);
  return {i, sum / static_cast<double>(ensemble.size())};
}

EnsembleSelection select_dipe(const CorrelationMatrix& c, std::span<const double> d, std::size_t k) {
  return greedy(Strategy::dipe, c, d, k,
                [&](std::size_t i, std::span<const std::size_t> members) { return avg_score(i, members, c, d); });
}

EnsembleSelection select_dipe_ablated(const CorrelationMatrix& c, std::span<const double> d, std::size_t k) {
  return greedy(Strategy::dipe_ablated, c, d, k,
                [&](std::size_t i, std::span<const std::size_t> members) { return avg_correlation(i, members, c); });
}

EnsembleSelection select_topk(std::span<const double> d, std::size_t k) {
  check_budget(k, d.size());
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
  order.resize(k);
  return EnsembleSelection{std::move(order), Strategy::topk, k, {}};
}

EnsembleSelection select_all(std::size_t n) {
  if (n == 0) throw ContractError("k out of range: empty model pool");
  std::vector<std::size_t> members(n);
  std::iota(members.begin(), members.end(), std::size_t{0});
  return EnsembleSelection{std::move(members), Strategy::all, n, {}};
}

EnsembleSelection select_exhaustive(const ValidationSet& set, std::size_t k, double t, const ExecConfig& exec) {
  const std::size_t n = set.model_count();
  if (n > kMaxExhaustiveModels) {
    throw ContractError("exhaustive search supports at most " + std::to_string(kMaxExhaustiveModels) +
                        " models (got " + std::to_string(n) + "); use the dipe or topk strategies instead");
  }
  check_budget(k, n);
  metrics::check_threshold(t);

  // All k-subsets in lexicographic order.
  std::vector<std::vector<std::size_t>> subsets;
  std::vector<std::size_t> current(k);
  std::iota(current.begin(), current.end(), std::size_t{0});
  while (true) {
    subsets.push_back(current);
    std::size_t pos = k;
    while (pos > 0 && current[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++current[pos - 1];
    for (std::size_t q = pos; q < k; ++q) current[q] = current[q - 1] + 1;
  }

  std::vector<double> fused_dice(subsets.size());
  const ExecConfig serial{1};
  parallel_for(subsets.size(), exec,
               [&](std::size_t idx) { fused_dice[idx] = evaluate_ensemble(subsets[idx], set, t, serial).dice; });

  std::size_t best = 0;
  for (std::size_t idx = 1; idx < subsets.size(); ++idx)
    if (fused_dice[idx] > fused_dice[best]) best = idx;
  return EnsembleSelection{subsets[best], Strategy::exhaustive, k, {}};
}

EnsembleSelection select(Strategy strategy, const CorrelationMatrix& c, std::span<const double> d, std::size_t k) {
  switch (strategy) {
    case Strategy::dipe: return select_dipe(c, d, k);
    case Strategy::dipe_ablated: return select_dipe_ablated(c, d, k);
    case Strategy::topk: check_inputs(c, d); return select_topk(d, k);
    case Strategy::all: check_inputs(c, d); return select_all(d.size());
    case Strategy::exhaustive: break;
  }
  throw ContractError("exhaustive selection needs the validation set, not just the correlation matrix");
}

std::string selection_to_json(const EnsembleSelection& selection, std::span<const std::string> model_ids) {
  using Json = nlohmann::ordered_json;
  auto id_of = [&](std::size_t i) -> const std::string& {
    if (i >= model_ids.size()) throw ContractError("selection member index out of range");
    return model_ids[i];
  };
  Json root;
  root["strategy"] = std::string(to_string(selection.strategy));
  root["k"] = selection.k;
  root["members"] = Json::array();
  for (std::size_t m : selection.members) root["members"].push_back(id_of(m));
  root["trace"] = Json::array();
  for (std::size_t s = 0; s < selection.trace.size(); ++s) {
    const auto& step = selection.trace[s];
    Json js;
    js["step"] = s + 2;
    js["candidates"] = Json::array();
    for (const auto& cand : step.candidates) {
      js["candidates"].push_back({{"model_id", id_of(cand.candidate)}, {"score", cand.value}});
    }
    js["chosen"] = id_of(step.chosen);
    root["trace"].push_back(std::move(js));
  }
  return root.dump(2) + "\n";
}

EnsembleSelection selection_from_json(const std::string& text, std::span<const std::string> model_ids) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("selection JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("members") || !root["members"].is_array()) {
    throw Error("selection JSON lacks a \"members\" array");
  }
  EnsembleSelection out;
  if (root.contains("strategy") && root["strategy"].is_string()) {
    const auto parsed = parse_strategy(root["strategy"].get<std::string>());
    if (!parsed) throw Error("selection JSON: unknown strategy");
    out.strategy = *parsed;
  }
  for (const auto& m : root["members"]) {
    if (!m.is_string()) throw Error("selection JSON: members must be model ids");
    const auto it = std::find(model_ids.begin(), model_ids.end(), m.get<std::string>());
    if (it == model_ids.end()) throw Error("selection JSON: unknown model \"" + m.get<std::string>() + "\"");
    out.members.push_back(static_cast<std::size_t>(it - model_ids.begin()));
  }
  out.k = root.contains("k") && root["k"].is_number_unsigned() ? root["k"].get<std::size_t>() : out.members.size();
  return out;
}

}  // namespace dipe
