#include "dipe/fusion.hpp"

#include <algorithm>

#include "dipe/error.hpp"
#include "dipe/tensor_io.hpp"

namespace dipe {

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::dipe: return "dipe";
    case Strategy::dipe_ablated: return "dipe_ablated";
    case Strategy::topk: return "topk";
    case Strategy::all: return "all";
    case Strategy::exhaustive: return "exhaustive";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
  if (name == "dipe") return Strategy::dipe;
  if (name == "dipe_ablated" || name == "dipe-ablated") return Strategy::dipe_ablated;
  if (name == "topk") return Strategy::topk;
  if (name == "all") return Strategy::all;
  if (name == "exhaustive") return Strategy::exhaustive;
  return std::nullopt;
}

namespace {

std::vector<std::size_t> sorted_members(std::span<const std::size_t> members, const ValidationSet& set) {
  if (members.empty()) throw ContractError("ensemble needs at least one member");
  std::vector<std::size_t> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.back() >= set.model_count()) throw ContractError("ensemble member index out of range");
  return sorted;
}

ProbabilityMap fuse_sorted(std::span<const std::size_t> sorted, std::size_t slice, const ValidationSet& set) {
  const Shape shape = set.truth(slice).shape();
  std::vector<double> sum(shape.size(), 0.0);
  for (std::size_t m : sorted) {
    const auto values = set.prediction(m, slice).values();
    for (std::size_t p = 0; p < sum.size(); ++p) sum[p] += values[p];
  }
  const double count = static_cast<double>(sorted.size());
  std::vector<float> out(sum.size());
  for (std::size_t p = 0; p < sum.size(); ++p) out[p] = static_cast<float>(sum[p] / count);
  return ProbabilityMap(shape, std::move(out));
}

}  // namespace

ProbabilityMap fuse(std::span<const std::size_t> members, std::size_t slice, const ValidationSet& set) {
  if (slice >= set.slice_count()) throw ContractError("slice index out of range");
  return fuse_sorted(sorted_members(members, set), slice, set);
}

EnsembleScore evaluate_ensemble(std::span<const std::size_t> members, const ValidationSet& set, double t,
                                const ExecConfig& exec) {
  metrics::check_threshold(t);
  const auto sorted = sorted_members(members, set);
  const auto slices = set.evaluated_slices();
  std::vector<metrics::SliceScore> per_slice(slices.size());
  parallel_for(slices.size(), exec, [&](std::size_t r) {
    const std::size_t s = slices[r];
    per_slice[r] = metrics::score_slice(metrics::threshold(fuse_sorted(sorted, s, set), t), set.truth(s));
  });
  std::vector<double> dice(slices.size()), iou(slices.size());
  for (std::size_t r = 0; r < slices.size(); ++r) {
    dice[r] = per_slice[r].dice;
    iou[r] = per_slice[r].iou;
  }
  return {metrics::ordered_mean(dice), metrics::ordered_mean(iou)};
}

void export_fused(std::span<const std::size_t> members, const ValidationSet& set, double t,
                  const std::filesystem::path& out_dir, bool write_probabilities, const ExecConfig& exec) {
  metrics::check_threshold(t);
  const auto sorted = sorted_members(members, set);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string(), ec.message());

  std::vector<std::vector<io::RleRow>> rows(set.slice_count());
  parallel_for(set.slice_count(), exec, [&](std::size_t s) {
    const ProbabilityMap fused = fuse_sorted(sorted, s, set);
    rows[s] = io::to_rle_rows(set.slice(s).id, set.class_names(), metrics::threshold(fused, t));
    if (write_probabilities) io::write_probability_map(fused, out_dir / (set.slice(s).id + ".dipe"));
  });
  std::vector<io::RleRow> flat;
  for (auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  io::write_rle_csv(out_dir / "fused.csv", flat);
}

}  // namespace dipe
