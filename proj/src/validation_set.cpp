#include "dipe/validation_set.hpp"

#include <algorithm>

#include "dipe/error.hpp"
#include "dipe/tensor_io.hpp"

namespace dipe {

ValidationSet::ValidationSet(std::vector<std::string> model_ids, std::vector<std::string> class_names,
                             std::vector<Slice> slices, std::vector<std::vector<ProbabilityMap>> predictions)
    : model_ids_(std::move(model_ids)),
      class_names_(std::move(class_names)),
      slices_(std::move(slices)),
      predictions_(std::move(predictions)) {
  if (model_ids_.empty()) throw ContractError("validation set needs at least one model");
  if (slices_.empty()) throw ContractError("validation set needs at least one slice");
  if (predictions_.size() != model_ids_.size()) throw ContractError("one prediction list per model required");
  for (std::size_t s = 0; s < slices_.size(); ++s) {
    const Shape& shape = slices_[s].truth.shape();
    if (shape.classes != class_names_.size()) {
      throw ContractError("slice \"" + slices_[s].id + "\" truth has " + std::to_string(shape.classes) +
                          " classes, expected " + std::to_string(class_names_.size()));
    }
    for (std::size_t m = 0; m < predictions_.size(); ++m) {
      if (predictions_[m].size() != slices_.size()) {
        throw ContractError("model \"" + model_ids_[m] + "\" lacks predictions");
      }
      if (predictions_[m][s].shape() != shape) {
        throw ContractError("model \"" + model_ids_[m] + "\" slice \"" + slices_[s].id + "\": shape mismatch");
      }
    }
    if (slices_[s].include) evaluated_.push_back(s);
  }
  if (evaluated_.empty()) throw ContractError("every slice is excluded");
}

ValidationSet ValidationSet::load(const Manifest& manifest, const ExecConfig& exec) {
  auto truth = load_ground_truth(manifest);
  std::vector<Slice> slices;
  for (std::size_t s = 0; s < manifest.slices.size(); ++s) {
    slices.push_back({manifest.slices[s].id, std::move(truth[s]), manifest.slices[s].include});
  }
  const std::size_t n = manifest.models.size();
  const std::size_t t = manifest.slices.size();
  std::vector<std::vector<ProbabilityMap>> predictions(n, std::vector<ProbabilityMap>(t));
  parallel_for(n * t, exec, [&](std::size_t idx) {
    const std::size_t m = idx / t;
    const std::size_t s = idx % t;
    const auto path = manifest.prediction_path(m, s);
    ProbabilityMap map = io::read_probability_map(path);
    if (map.shape() != manifest.slice_shape(s)) {
      throw ManifestError(ManifestError::Kind::dimension_mismatch, path.string());
    }
    predictions[m][s] = std::move(map);
  });

  std::vector<std::string> ids;
  for (const auto& mdl : manifest.models) ids.push_back(mdl.model_id);
  return ValidationSet(std::move(ids), manifest.class_names, std::move(slices), std::move(predictions));
}

std::size_t ValidationSet::model_index(const std::string& model_id) const {
  const auto it = std::find(model_ids_.begin(), model_ids_.end(), model_id);
  if (it == model_ids_.end()) throw ContractError("unknown model_id \"" + model_id + "\"");
  return static_cast<std::size_t>(it - model_ids_.begin());
}

ValidationSet ValidationSet::with_truth(std::vector<BinaryMaskSet> truth) const {
  if (truth.size() != slices_.size()) throw ContractError("replacement truth must cover every slice");
  std::vector<Slice> slices = slices_;
  for (std::size_t s = 0; s < slices.size(); ++s) slices[s].truth = std::move(truth[s]);
  return ValidationSet(model_ids_, class_names_, std::move(slices), predictions_);
}

ValidationSet ValidationSet::with_models(std::span<const std::size_t> models) const {
  std::vector<std::string> ids;
  std::vector<std::vector<ProbabilityMap>> preds;
  for (std::size_t m : models) {
    ids.push_back(model_ids_.at(m));
    preds.push_back(predictions_.at(m));
  }
  return ValidationSet(std::move(ids), class_names_, slices_, std::move(preds));
}

}  // namespace dipe
