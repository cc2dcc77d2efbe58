#include "dipe/synth.hpp"

#include <cmath>
#include <set>

#include "dipe/error.hpp"
#include "dipe/metrics.hpp"
#include "dipe/tensor_io.hpp"
#include "json.hpp"

namespace dipe::synth {

namespace {

// Stream tags keep the uniform draws of different purposes independent.
enum Stream : std::uint64_t { kSlice = 1, kShape = 2, kGroupField = 3, kModelField = 4, kConfidence = 5 };

struct Blob {
  bool present = false;
  bool ellipse = true;
  double cx = 0, cy = 0, rx = 1, ry = 1;
};

Blob draw_blob(const SynthSpec& spec, std::size_t slice, std::uint32_t cls) {
  const auto u = [&](std::uint64_t field) { return uniform(spec.seed, {kShape, slice, cls, field}); };
  Blob b;
  b.present = u(0) < 0.75;
  b.ellipse = u(1) < 0.5;
  const double w = spec.dims.width, h = spec.dims.height;
  b.cx = w * (0.2 + 0.6 * u(2));
  b.cy = h * (0.2 + 0.6 * u(3));
  b.rx = std::max(1.0, w * (0.08 + 0.17 * u(4)));
  b.ry = std::max(1.0, h * (0.08 + 0.17 * u(5)));
  return b;
}

/// Approximate signed distance in pixels to the blob boundary (negative inside).
double signed_distance(const Blob& b, double x, double y) {
  const double dx = x - b.cx, dy = y - b.cy;
  if (b.ellipse) {
    const double r = std::sqrt((dx / b.rx) * (dx / b.rx) + (dy / b.ry) * (dy / b.ry));
    return (r - 1.0) * std::min(b.rx, b.ry);
  }
  return std::max(std::abs(dx) - b.rx, std::abs(dy) - b.ry);
}

std::string default_model_id(std::size_t i) { return "m" + std::to_string(i); }

std::string slice_id(std::size_t s) {
  std::string digits = std::to_string(s);
  return "slice_" + std::string(digits.size() < 4 ? 4 - digits.size() : 0, '0') + digits;
}

std::vector<std::string> class_names_of(const SynthSpec& spec) {
  if (!spec.class_names.empty()) return spec.class_names;
  std::vector<std::string> names;
  for (std::uint32_t c = 0; c < spec.dims.classes; ++c) names.push_back("class_" + std::to_string(c));
  return names;
}

std::vector<std::string> model_ids_of(const SynthSpec& spec) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < spec.models.size(); ++i) {
    ids.push_back(spec.models[i].model_id.empty() ? default_model_id(i) : spec.models[i].model_id);
  }
  return ids;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double uniform(std::uint64_t seed, std::initializer_list<std::uint64_t> key) noexcept {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t k : key) h = mix64(h ^ k);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

void validate(const SynthSpec& spec) {
  if (spec.slices < 1) throw ContractError("synth spec: slices must be >= 1");
  if (spec.dims.classes < 1 || spec.dims.height < 1 || spec.dims.width < 1) {
    throw ContractError("synth spec: dims must be >= 1");
  }
  if (spec.dims.classes > 0xffff) throw ContractError("synth spec: too many classes");
  if (!spec.class_names.empty() && spec.class_names.size() != spec.dims.classes) {
    throw ContractError("synth spec: class_names length must equal dims.classes");
  }
  if (spec.models.empty()) throw ContractError("synth spec: at least one model required");
  if (!(spec.shared_fraction >= 0.0 && spec.shared_fraction <= 1.0)) {
    throw ContractError("synth spec: shared_fraction must lie in [0,1]");
  }
  if (!(spec.empty_fraction >= 0.0 && spec.empty_fraction <= 1.0)) {
    throw ContractError("synth spec: empty_fraction must lie in [0,1]");
  }
  if (!(spec.boundary_width > 0.0)) throw ContractError("synth spec: boundary_width must be > 0");
  for (const auto& m : spec.models) {
    if (!(m.noise_rate >= 0.0 && m.noise_rate < 0.5)) {
      throw ContractError("synth spec: noise_rate must lie in [0, 0.5)");
    }
  }
  const auto ids = model_ids_of(spec);
  if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size()) {
    throw ContractError("synth spec: duplicate model_id");
  }
}

SynthSpec spec_from_json(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("synth spec JSON: ") + e.what());
  }
  SynthSpec spec;
  try {
    spec.seed = root.at("seed").get<std::uint64_t>();
    spec.slices = root.at("slices").get<std::size_t>();
    const auto& dims = root.at("dims");
    spec.dims = Shape{dims.at("classes").get<std::uint32_t>(), dims.at("height").get<std::uint32_t>(),
                      dims.at("width").get<std::uint32_t>()};
    if (root.contains("class_names")) spec.class_names = root["class_names"].get<std::vector<std::string>>();
    spec.shared_fraction = root.value("shared_fraction", spec.shared_fraction);
    spec.empty_fraction = root.value("empty_fraction", spec.empty_fraction);
    spec.boundary_width = root.value("boundary_width", spec.boundary_width);
    for (const auto& m : root.at("models")) {
      ModelSpec ms;
      ms.model_id = m.value("model_id", std::string());
      ms.name = m.value("name", std::string());
      ms.noise_rate = m.at("noise_rate").get<double>();
      ms.correlation_group = m.at("correlation_group").get<std::int64_t>();
      spec.models.push_back(std::move(ms));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("synth spec JSON: ") + e.what());
  }
  validate(spec);
  return spec;
}

std::string spec_to_json(const SynthSpec& spec) {
  nlohmann::ordered_json root;
  root["seed"] = spec.seed;
  root["slices"] = spec.slices;
  root["dims"] = {{"classes", spec.dims.classes}, {"height", spec.dims.height}, {"width", spec.dims.width}};
  if (!spec.class_names.empty()) root["class_names"] = spec.class_names;
  root["shared_fraction"] = spec.shared_fraction;
  root["empty_fraction"] = spec.empty_fraction;
  root["boundary_width"] = spec.boundary_width;
  root["models"] = nlohmann::ordered_json::array();
  for (const auto& m : spec.models) {
    nlohmann::ordered_json jm;
    if (!m.model_id.empty()) jm["model_id"] = m.model_id;
    if (!m.name.empty()) jm["name"] = m.name;
    jm["noise_rate"] = m.noise_rate;
    jm["correlation_group"] = m.correlation_group;
    root["models"].push_back(std::move(jm));
  }
  return root.dump(2) + "\n";
}

ValidationSet generate_in_memory(const SynthSpec& spec) {
  validate(spec);
  const Shape shape = spec.dims;
  const std::size_t n = spec.models.size();
  std::vector<ValidationSet::Slice> slices;
  std::vector<std::vector<ProbabilityMap>> predictions(n);

  for (std::size_t s = 0; s < spec.slices; ++s) {
    const bool background_only = uniform(spec.seed, {kSlice, s}) < spec.empty_fraction;
    BinaryMaskSet truth(shape);
    std::vector<std::vector<float>> probs(n, std::vector<float>(shape.size()));

    for (std::uint32_t c = 0; c < shape.classes; ++c) {
      Blob blob = draw_blob(spec, s, c);
      if (background_only) blob.present = false;
      auto plane = truth.plane(c);
      for (std::uint32_t y = 0; y < shape.height; ++y) {
        for (std::uint32_t x = 0; x < shape.width; ++x) {
          const std::size_t p = std::size_t{y} * shape.width + x;
          const std::size_t flat = c * shape.plane_size() + p;
          double weight = 0.0;
          std::uint8_t label = 0;
          if (blob.present) {
            const double dist = signed_distance(blob, x + 0.5, y + 0.5);
            label = dist <= 0.0 ? 1 : 0;
            const double z = dist / spec.boundary_width;
            weight = std::exp(-z * z);
          }
          plane[p] = label;
          for (std::size_t m = 0; m < n; ++m) {
            const auto& model = spec.models[m];
            const auto group = static_cast<std::uint64_t>(model.correlation_group);
            const double shared = model.noise_rate * weight * spec.shared_fraction;
            const double own = model.noise_rate * weight * (1.0 - spec.shared_fraction);
            const bool flipped = uniform(spec.seed, {kGroupField, group, s, c, p}) < shared ||
                                 uniform(spec.seed, {kModelField, m, s, c, p}) < own;
            const std::uint8_t predicted = flipped ? 1 - label : label;
            const double u = uniform(spec.seed, {kConfidence, m, s, c, p});
            const double confidence = flipped ? 0.02 + 0.5 * u : 0.3 + 0.68 * u;
            probs[m][flat] = static_cast<float>(predicted ? 0.5 + 0.5 * confidence : 0.5 - 0.5 * confidence);
          }
        }
      }
    }
    slices.push_back({slice_id(s), std::move(truth), true});
    for (std::size_t m = 0; m < n; ++m) predictions[m].emplace_back(shape, std::move(probs[m]));
  }
  return ValidationSet(model_ids_of(spec), class_names_of(spec), std::move(slices), std::move(predictions));
}

Manifest generate(const SynthSpec& spec, const std::filesystem::path& out_dir) {
  const ValidationSet set = generate_in_memory(spec);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string(), ec.message());

  Manifest manifest;
  manifest.base_dir = out_dir;
  manifest.class_names = set.class_names();
  std::vector<io::RleRow> rows;
  for (std::size_t s = 0; s < set.slice_count(); ++s) {
    const auto& slice = set.slice(s);
    manifest.slices.push_back({slice.id, spec.dims.height, spec.dims.width, "truth.csv", slice.id, true});
    auto slice_rows = io::to_rle_rows(slice.id, set.class_names(), slice.truth);
    rows.insert(rows.end(), slice_rows.begin(), slice_rows.end());
  }
  io::write_rle_csv(out_dir / "truth.csv", rows);

  for (std::size_t m = 0; m < set.model_count(); ++m) {
    const std::string& id = set.model_ids()[m];
    const std::filesystem::path rel = std::filesystem::path("preds") / id;
    std::filesystem::create_directories(out_dir / rel, ec);
    if (ec) throw IoError((out_dir / rel).string(), ec.message());
    for (std::size_t s = 0; s < set.slice_count(); ++s) {
      io::write_probability_map(set.prediction(m, s), out_dir / rel / (set.slice(s).id + ".dipe"));
    }
    const auto& name = spec.models[m].name;
    manifest.models.push_back({id, name.empty() ? id : name, rel});
  }
  write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace dipe::synth
