#include "dipe/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "dipe/error.hpp"
#include "json.hpp"

namespace dipe::metrics {

namespace {

void check_same_shape(const BinaryMaskSet& a, const BinaryMaskSet& b) {
  if (a.shape() != b.shape()) throw ContractError("mask sets differ in dimensions");
}

}  // namespace

OverlapCounts count_overlap(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw ContractError("planes differ in size");
  std::uint64_t inter = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a[i] & b[i];
    na += a[i];
    nb += b[i];
  }
  return {inter, na, nb};
}

double dice(const OverlapCounts& c) noexcept {
  const std::uint64_t denom = c.first + c.second;
  if (denom == 0) return 1.0;
  return static_cast<double>(2 * c.intersection) / static_cast<double>(denom);
}

double iou(const OverlapCounts& c) noexcept {
  const std::uint64_t uni = c.first + c.second - c.intersection;
  if (uni == 0) return 1.0;
  return static_cast<double>(c.intersection) / static_cast<double>(uni);
}

SliceScore score_slice(const BinaryMaskSet& a, const BinaryMaskSet& b) {
  check_same_shape(a, b);
  double dice_sum = 0.0, iou_sum = 0.0;
  const std::uint32_t classes = a.shape().classes;
  for (std::uint32_t c = 0; c < classes; ++c) {
    const OverlapCounts counts = count_overlap(a.plane(c), b.plane(c));
    dice_sum += dice(counts);
    iou_sum += iou(counts);
  }
  return {dice_sum / classes, iou_sum / classes};
}

double dice(const BinaryMaskSet& a, const BinaryMaskSet& b) { return score_slice(a, b).dice; }
double iou(const BinaryMaskSet& a, const BinaryMaskSet& b) { return score_slice(a, b).iou; }

void check_threshold(double t) {
  if (!(t > 0.0 && t < 1.0)) throw ContractError("threshold must lie in (0,1), got " + format_double(t));
}

BinaryMaskSet threshold(const ProbabilityMap& map, double t) {
  check_threshold(t);
  BinaryMaskSet out(map.shape());
  const auto in = map.values();
  auto px = out.pixels();
  for (std::size_t i = 0; i < in.size(); ++i) px[i] = static_cast<double>(in[i]) >= t ? 1 : 0;
  return out;
}

double ordered_mean(std::span<const double> values) {
  if (values.empty()) throw ContractError("mean of an empty sequence");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

ModelScores score_models(const ValidationSet& set, double t, const ExecConfig& exec) {
  check_threshold(t);
  const auto slices = set.evaluated_slices();
  const std::size_t n = set.model_count();
  const std::size_t t_count = slices.size();

  std::vector<SliceScore> per_slice(n * t_count);
  parallel_for(n * t_count, exec, [&](std::size_t idx) {
    const std::size_t m = idx / t_count;
    const std::size_t s = slices[idx % t_count];
    per_slice[idx] = score_slice(threshold(set.prediction(m, s), t), set.truth(s));
  });

  ModelScores out;
  out.model_ids = set.model_ids();
  std::vector<double> dice_col(t_count), iou_col(t_count);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t r = 0; r < t_count; ++r) {
      dice_col[r] = per_slice[m * t_count + r].dice;
      iou_col[r] = per_slice[m * t_count + r].iou;
    }
    out.dice.push_back(ordered_mean(dice_col));
    out.iou.push_back(ordered_mean(iou_col));
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string scores_to_json(const ModelScores& scores) {
  std::string out = "{";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out += i == 0 ? "\n  " : ",\n  ";
    out += nlohmann::json(scores.model_ids[i]).dump();
    out += ": {\"dice\": " + format_double(scores.dice[i]) + ", \"iou\": " + format_double(scores.iou[i]) + "}";
  }
  out += scores.size() ? "\n}\n" : "}\n";
  return out;
}

ModelScores scores_from_json(const std::string& text) {
  nlohmann::ordered_json root;
  try {
    root = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("scores JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error("scores JSON must be an object");
  ModelScores out;
  for (const auto& [id, entry] : root.items()) {
    if (!entry.is_object() || !entry.contains("dice") || !entry["dice"].is_number()) {
      throw Error("scores JSON: model \"" + id + "\" lacks a numeric \"dice\"");
    }
    const double d = entry["dice"].get<double>();
    const double j = entry.contains("iou") && entry["iou"].is_number() ? entry["iou"].get<double>() : 0.0;
    if (!(d >= 0.0 && d <= 1.0)) throw Error("scores JSON: dice of \"" + id + "\" outside [0,1]");
    out.model_ids.push_back(id);
    out.dice.push_back(d);
    out.iou.push_back(j);
  }
  return out;
}

}  // namespace dipe::metrics
