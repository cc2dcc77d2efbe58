#include "dipe/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dipe/error.hpp"
#include "dipe/tensor_io.hpp"

namespace dipe {

CorrelationMatrix::CorrelationMatrix(std::vector<std::string> model_ids, std::vector<double> values)
    : model_ids_(std::move(model_ids)), values_(std::move(values)) {
  const std::size_t n = model_ids_.size();
  if (n == 0) throw ContractError("correlation matrix needs at least one model");
  if (values_.size() != n * n) throw ContractError("correlation matrix must be square");
  for (std::size_t i = 0; i < n; ++i) {
    if ((*this)(i, i) != 1.0) throw ContractError("correlation diagonal must be exactly 1");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = (*this)(i, j);
      if (!(v >= 0.0 && v <= 1.0)) throw ContractError("correlation entries must lie in [0,1]");
      if (v != (*this)(j, i)) throw ContractError("correlation matrix must be symmetric");
    }
  }
}

double pairwise_dice(std::size_t i, std::size_t j, const ValidationSet& set, double t) {
  if (i >= set.model_count() || j >= set.model_count()) throw ContractError("model index out of range");
  if (i == j) return 1.0;
  // Fixed orientation so (i, j) and (j, i) run the identical computation.
  const std::size_t lo = std::min(i, j), hi = std::max(i, j);
  std::vector<double> per_slice;
  for (std::size_t s : set.evaluated_slices()) {
    per_slice.push_back(
        metrics::dice(metrics::threshold(set.prediction(lo, s), t), metrics::threshold(set.prediction(hi, s), t)));
  }
  return metrics::ordered_mean(per_slice);
}

CorrelationMatrix correlation_matrix(const ValidationSet& set, double t, const ExecConfig& exec) {
  metrics::check_threshold(t);
  const std::size_t n = set.model_count();
  const auto slices = set.evaluated_slices();
  const std::size_t t_count = slices.size();

  std::vector<BinaryMaskSet> masks(n * t_count);
  parallel_for(n * t_count, exec, [&](std::size_t idx) {
    masks[idx] = metrics::threshold(set.prediction(idx / t_count, slices[idx % t_count]), t);
  });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  std::vector<double> per_slice(pairs.size() * t_count);
  parallel_for(per_slice.size(), exec, [&](std::size_t idx) {
    const auto [i, j] = pairs[idx / t_count];
    const std::size_t r = idx % t_count;
    per_slice[idx] = metrics::dice(masks[i * t_count + r], masks[j * t_count + r]);
  });

  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) values[i * n + i] = 1.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    const double v = metrics::ordered_mean(std::span<const double>(per_slice).subspan(p * t_count, t_count));
    values[i * n + j] = v;
    values[j * n + i] = v;
  }
  return CorrelationMatrix(set.model_ids(), std::move(values));
}

std::string correlation_to_csv(const CorrelationMatrix& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.model_ids()[i].find_first_of(",\n") != std::string::npos) {
      throw ContractError("model ids in CSV may not contain ',' or newlines");
    }
    out += (i ? "," : "") + c.model_ids()[i];
  }
  out += '\n';
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) out += (j ? "," : "") + metrics::format_double(c(i, j));
    out += '\n';
  }
  return out;
}

CorrelationMatrix correlation_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto cells_of = [](std::string row) {
    if (!row.empty() && row.back() == '\r') row.pop_back();
    std::vector<std::string> cells;
    std::stringstream ss(row);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!row.empty() && row.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(in, line)) throw Error("correlation CSV is empty");
  std::vector<std::string> ids = cells_of(line);
  if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size()) {
    throw Error("correlation CSV: duplicate model ids");
  }
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = cells_of(line);
    if (cells.size() != ids.size()) {
      throw Error("correlation CSV row " + std::to_string(rows + 1) + " has " + std::to_string(cells.size()) +
                  " cells, expected " + std::to_string(ids.size()));
    }
    for (const auto& cell : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size()) throw Error("correlation CSV: bad number \"" + cell + "\"");
      values.push_back(v);
    }
    ++rows;
  }
  if (rows != ids.size()) throw Error("correlation CSV must have one row per model");
  try {
    return CorrelationMatrix(std::move(ids), std::move(values));
  } catch (const ContractError& e) {
    throw Error(std::string("correlation CSV: ") + e.what());
  }
}

std::vector<std::uint8_t> correlation_to_pgm(const CorrelationMatrix& c) {
  const std::size_t n = c.size();
  const double lo = *std::min_element(c.values().begin(), c.values().end());
  const std::string header = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (double v : c.values()) {
    const double level = lo < 1.0 ? (v - lo) / (1.0 - lo) : 1.0;
    out.push_back(static_cast<std::uint8_t>(std::lround(255.0 * level)));
  }
  return out;
}

void export_heatmap(const CorrelationMatrix& c, const std::filesystem::path& csv_path) {
  io::write_text_file(csv_path, correlation_to_csv(c));
  auto pgm_path = csv_path;
  pgm_path.replace_extension(".pgm");
  io::write_file(pgm_path, correlation_to_pgm(c));
}

}  // namespace dipe
