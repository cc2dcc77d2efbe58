#include "dipe/manifest.hpp"

#include <map>
#include <set>

#include "dipe/error.hpp"
#include "dipe/tensor_io.hpp"
#include "json.hpp"

namespace dipe {

namespace {

using Json = nlohmann::ordered_json;
using Kind = ManifestError::Kind;

const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ManifestError(Kind::schema, where + ": missing key \"" + key + "\"");
  }
  return obj.at(key);
}

std::string require_string(const Json& obj, const char* key, const std::string& where) {
  const Json& v = require(obj, key, where);
  if (!v.is_string() || v.get_ref<const std::string&>().empty()) {
    throw ManifestError(Kind::schema, where + ": \"" + key + "\" must be a non-empty string");
  }
  return v.get<std::string>();
}

std::uint32_t require_dim(const Json& obj, const char* key, const std::string& where) {
  const Json& v = require(obj, key, where);
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0 || v.get<std::uint64_t>() > 0xffffffffu) {
    throw ManifestError(Kind::schema, where + ": \"" + key + "\" must be a positive integer");
  }
  return v.get<std::uint32_t>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  return p.is_absolute() ? p : base / p;
}

}  // namespace

std::filesystem::path Manifest::prediction_path(std::size_t model, std::size_t slice) const {
  return resolve(base_dir, models.at(model).pred_dir) / (slices.at(slice).id + ".dipe");
}

std::filesystem::path Manifest::truth_path(std::size_t slice) const {
  return resolve(base_dir, slices.at(slice).truth_file);
}

Shape Manifest::slice_shape(std::size_t slice) const {
  const auto& s = slices.at(slice);
  return Shape{static_cast<std::uint32_t>(class_names.size()), s.height, s.width};
}

Manifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ManifestError(Kind::schema, std::string("invalid JSON: ") + e.what());
  }
  Manifest m;
  m.base_dir = base_dir;

  const Json& classes = require(root, "class_names", "manifest");
  if (!classes.is_array() || classes.empty()) {
    throw ManifestError(Kind::schema, "\"class_names\" must be a non-empty array");
  }
  for (const auto& c : classes) {
    if (!c.is_string() || c.get_ref<const std::string&>().empty()) {
      throw ManifestError(Kind::schema, "class names must be non-empty strings");
    }
    m.class_names.push_back(c.get<std::string>());
  }
  if (std::set<std::string>(m.class_names.begin(), m.class_names.end()).size() != m.class_names.size()) {
    throw ManifestError(Kind::schema, "class names must be unique");
  }

  const Json& slices = require(root, "slices", "manifest");
  if (!slices.is_array() || slices.empty()) throw ManifestError(Kind::schema, "\"slices\" must be a non-empty array");
  std::set<std::string> slice_ids;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    const std::string where = "slices[" + std::to_string(i) + "]";
    const Json& s = slices[i];
    SliceEntry entry;
    entry.id = require_string(s, "id", where);
    entry.height = require_dim(s, "height", where);
    entry.width = require_dim(s, "width", where);
    const Json& ref = require(s, "truth_rle_row_refs", where);
    entry.truth_file = require_string(ref, "file", where + ".truth_rle_row_refs");
    entry.truth_id = ref.contains("id") ? require_string(ref, "id", where + ".truth_rle_row_refs") : entry.id;
    if (s.contains("include")) {
      if (!s["include"].is_boolean()) throw ManifestError(Kind::schema, where + ": \"include\" must be a boolean");
      entry.include = s["include"].get<bool>();
    }
    if (!slice_ids.insert(entry.id).second) throw ManifestError(Kind::duplicate_slice, "\"" + entry.id + "\"");
    m.slices.push_back(std::move(entry));
  }

  const Json& models = require(root, "models", "manifest");
  if (!models.is_array() || models.empty()) throw ManifestError(Kind::schema, "\"models\" must be a non-empty array");
  std::set<std::string> model_ids;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::string where = "models[" + std::to_string(i) + "]";
    const Json& mj = models[i];
    ModelEntry entry;
    entry.model_id = require_string(mj, "model_id", where);
    entry.name = mj.contains("name") ? require_string(mj, "name", where) : entry.model_id;
    entry.pred_dir = require_string(mj, "pred_dir", where);
    if (!model_ids.insert(entry.model_id).second) {
      throw ManifestError(Kind::duplicate_model, "\"" + entry.model_id + "\"");
    }
    m.models.push_back(std::move(entry));
  }
  return m;
}

std::string manifest_to_json(const Manifest& manifest) {
  Json root;
  root["class_names"] = manifest.class_names;
  root["slices"] = Json::array();
  for (const auto& s : manifest.slices) {
    Json js;
    js["id"] = s.id;
    js["height"] = s.height;
    js["width"] = s.width;
    js["truth_rle_row_refs"] = {{"file", s.truth_file.generic_string()}, {"id", s.truth_id}};
    if (!s.include) js["include"] = false;
    root["slices"].push_back(std::move(js));
  }
  root["models"] = Json::array();
  for (const auto& mdl : manifest.models) {
    root["models"].push_back({{"model_id", mdl.model_id}, {"name", mdl.name}, {"pred_dir", mdl.pred_dir.generic_string()}});
  }
  return root.dump(2) + "\n";
}

Manifest load_manifest(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  Manifest m = parse_manifest(std::string(bytes.begin(), bytes.end()), path.parent_path());

  for (std::size_t mi = 0; mi < m.models.size(); ++mi) {
    for (std::size_t si = 0; si < m.slices.size(); ++si) {
      const auto file = m.prediction_path(mi, si);
      if (!std::filesystem::is_regular_file(file)) {
        throw ManifestError(Kind::missing_prediction, "model \"" + m.models[mi].model_id + "\" has no prediction for slice \"" +
                                                          m.slices[si].id + "\" (" + file.string() + ")");
      }
      const Shape got = io::read_probability_map_shape(file);
      const Shape want = m.slice_shape(si);
      if (got != want) {
        throw ManifestError(Kind::dimension_mismatch,
                            "model \"" + m.models[mi].model_id + "\" slice \"" + m.slices[si].id + "\": tensor is " +
                                std::to_string(got.classes) + "x" + std::to_string(got.height) + "x" +
                                std::to_string(got.width) + ", expected " + std::to_string(want.classes) + "x" +
                                std::to_string(want.height) + "x" + std::to_string(want.width));
      }
    }
  }
  load_ground_truth(m);
  return m;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  io::write_text_file(path, manifest_to_json(manifest));
}

std::vector<BinaryMaskSet> load_ground_truth(const Manifest& manifest) {
  // (csv file) -> (id, class) -> segmentation
  std::map<std::filesystem::path, std::map<std::pair<std::string, std::string>, std::string>> tables;
  std::set<std::string> known_classes(manifest.class_names.begin(), manifest.class_names.end());

  std::vector<BinaryMaskSet> truth;
  truth.reserve(manifest.slices.size());
  for (std::size_t si = 0; si < manifest.slices.size(); ++si) {
    const auto file = manifest.truth_path(si);
    auto it = tables.find(file);
    if (it == tables.end()) {
      std::map<std::pair<std::string, std::string>, std::string> table;
      for (auto& row : io::read_rle_csv(file)) {
        if (!known_classes.count(row.class_name)) {
          throw ManifestError(Kind::unknown_class, file.string() + ": class \"" + row.class_name + "\" for id \"" +
                                                       row.id + "\"");
        }
        auto key = std::make_pair(row.id, row.class_name);
        if (!table.emplace(key, std::move(row.segmentation)).second) {
          throw ManifestError(Kind::schema, file.string() + ": duplicate row for id \"" + key.first + "\" class \"" +
                                                key.second + "\"");
        }
      }
      it = tables.emplace(file, std::move(table)).first;
    }

    const auto& slice = manifest.slices[si];
    BinaryMaskSet masks(manifest.slice_shape(si));
    for (std::uint32_t c = 0; c < manifest.class_names.size(); ++c) {
      const auto row = it->second.find({slice.truth_id, manifest.class_names[c]});
      if (row == it->second.end()) continue;
      try {
        masks.set_plane(c, io::decode_rle(row->second, slice.height, slice.width));
      } catch (const RleError& e) {
        throw ManifestError(Kind::schema, "ground truth for slice \"" + slice.id + "\" class \"" +
                                              manifest.class_names[c] + "\": " + e.what());
      }
    }
    truth.push_back(std::move(masks));
  }
  return truth;
}

}  // namespace dipe
