#include "dipe/reference.hpp"

namespace dipe::reference {

metrics::ModelScores score_models(const ValidationSet& set, double t) {
  metrics::ModelScores out;
  out.model_ids = set.model_ids();
  for (std::size_t m = 0; m < set.model_count(); ++m) {
    double dice_sum = 0.0, iou_sum = 0.0;
    for (std::size_t s : set.evaluated_slices()) {
      const auto score = metrics::score_slice(metrics::threshold(set.prediction(m, s), t), set.truth(s));
      dice_sum += score.dice;
      iou_sum += score.iou;
    }
    const auto count = static_cast<double>(set.evaluated_slices().size());
    out.dice.push_back(dice_sum / count);
    out.iou.push_back(iou_sum / count);
  }
  return out;
}

CorrelationMatrix correlation_matrix(const ValidationSet& set, double t) {
  const std::size_t n = set.model_count();
  std::vector<double> values(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = pairwise_dice(i, j, set, t);
      values[i * n + j] = v;
      values[j * n + i] = v;
    }
  }
  return CorrelationMatrix(set.model_ids(), std::move(values));
}

EnsembleScore evaluate_ensemble(std::span<const std::size_t> members, const ValidationSet& set, double t) {
  double dice_sum = 0.0, iou_sum = 0.0;
  for (std::size_t s : set.evaluated_slices()) {
    const auto score = metrics::score_slice(metrics::threshold(fuse(members, s, set), t), set.truth(s));
    dice_sum += score.dice;
    iou_sum += score.iou;
  }
  const auto count = static_cast<double>(set.evaluated_slices().size());
  return {dice_sum / count, iou_sum / count};
}

}  // namespace dipe::reference
