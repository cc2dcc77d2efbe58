#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dipe/correlation.hpp"
#include "dipe/ensemble.hpp"
#include "dipe/metrics.hpp"
#include "dipe/parallel.hpp"
#include "dipe/validation_set.hpp"

namespace dipe {

/// Inclusive budget range; empty when last < first.
struct KRange {
  std::size_t first = 1;
  std::size_t last = 0;

  bool empty() const noexcept { return last < first; }
};

/// "2..9" or a single "5". "3..2" parses to an empty range.
KRange parse_k_range(std::string_view text);

struct SweepRow {
  std::size_t k = 0;
  std::string strategy;
  double dice = 0.0;
  double iou = 0.0;
  std::vector<std::size_t> members;  // not part of the CSV

  bool operator==(const SweepRow& o) const {
    return k == o.k && strategy == o.strategy && dice == o.dice && iou == o.iou;
  }
};

/// Rows ordered by k, then by the requested strategy order, followed by the
/// no-budget "all" reference row (k = n). An empty k range yields no rows.
struct SweepReport {
  std::vector<std::string> model_ids;
  std::vector<std::string> strategies;
  std::vector<SweepRow> rows;
};

SweepReport sweep(const ValidationSet& set, std::span<const Strategy> strategies, KRange k_range,
                  double t = metrics::kDefaultThreshold, const ExecConfig& exec = {});

/// Same, reusing an already computed matrix and scores.
SweepReport sweep(const ValidationSet& set, const CorrelationMatrix& c, const metrics::ModelScores& scores,
                  std::span<const Strategy> strategies, KRange k_range, double t = metrics::kDefaultThreshold,
                  const ExecConfig& exec = {});

enum class RenderFormat { table, csv, series };

/// csv: `k,strategy,dice,iou` long format. series: one column per strategy
/// plus `all`, one row per k, for plotting.
std::string render(const SweepReport& report, RenderFormat format);
std::vector<SweepRow> parse_report_csv(const std::string& text);

}  // namespace dipe
