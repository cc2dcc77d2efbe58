#include "dipe/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "dipe/error.hpp"
#include "dipe/fusion.hpp"
#include "dipe/selection.hpp"

namespace dipe {

namespace {

std::size_t parse_size(std::string_view text, std::string_view whole) {
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
    throw ContractError("bad k range \"" + std::string(whole) + "\"");
  }
  return v;
}

}  // namespace

KRange parse_k_range(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    const std::size_t k = parse_size(text, text);
    return {k, k};
  }
  return {parse_size(text.substr(0, dots), text), parse_size(text.substr(dots + 2), text)};
}

SweepReport sweep(const ValidationSet& set, std::span<const Strategy> strategies, KRange k_range, double t,
                  const ExecConfig& exec) {
  const CorrelationMatrix c = correlation_matrix(set, t, exec);
  const metrics::ModelScores scores = metrics::score_models(set, t, exec);
  return sweep(set, c, scores, strategies, k_range, t, exec);
}

SweepReport sweep(const ValidationSet& set, const CorrelationMatrix& c, const metrics::ModelScores& scores,
                  std::span<const Strategy> strategies, KRange k_range, double t, const ExecConfig& exec) {
  const std::size_t n = set.model_count();
  if (c.size() != n || scores.size() != n) throw ContractError("matrix and scores must cover the validation set");
  SweepReport report;
  report.model_ids = set.model_ids();
  for (Strategy s : strategies) report.strategies.emplace_back(to_string(s));
  if (k_range.empty()) return report;
  if (k_range.first < 1 || k_range.last > n) {
    throw ContractError("k out of range: " + std::to_string(k_range.first) + ".." + std::to_string(k_range.last) +
                        " not within 1.." + std::to_string(n));
  }

  std::vector<EnsembleSelection> selections;
  for (std::size_t k = k_range.first; k <= k_range.last; ++k) {
    for (Strategy s : strategies) {
      selections.push_back(s == Strategy::exhaustive ? select_exhaustive(set, k, t, exec)
                                                     : select(s, c, scores.dice, k));
    }
  }
  selections.push_back(select_all(n));

  std::vector<EnsembleScore> results(selections.size());
  const ExecConfig serial{1};
  parallel_for(selections.size(), exec,
               [&](std::size_t i) { results[i] = evaluate_ensemble(selections[i], set, t, serial); });

  for (std::size_t i = 0; i < selections.size(); ++i) {
    const auto& sel = selections[i];
    report.rows.push_back(
        {sel.members.size(), std::string(to_string(sel.strategy)), results[i].dice, results[i].iou, sel.members});
  }
  return report;
}

std::string render(const SweepReport& report, RenderFormat format) {
  std::string out;
  switch (format) {
    case RenderFormat::csv:
      out = "k,strategy,dice,iou\n";
      for (const auto& r : report.rows) {
        out += std::to_string(r.k) + "," + r.strategy + "," + metrics::format_double(r.dice) + "," +
               metrics::format_double(r.iou) + "\n";
      }
      return out;
    case RenderFormat::table: {
      char line[256];
      std::snprintf(line, sizeof line, "%-4s %-14s %-10s %-10s %s\n", "k", "strategy", "dice", "iou", "members");
      out = line;
      for (const auto& r : report.rows) {
        std::string members;
        for (std::size_t m : r.members) members += (members.empty() ? "" : ",") + report.model_ids.at(m);
        std::snprintf(line, sizeof line, "%-4zu %-14s %-10.6f %-10.6f ", r.k, r.strategy.c_str(), r.dice, r.iou);
        out += line + members + "\n";
      }
      return out;
    }
    case RenderFormat::series: {
      out = "k";
      for (const auto& s : report.strategies) out += "," + s;
      out += ",all\n";
      const auto all = std::find_if(report.rows.begin(), report.rows.end(),
                                    [](const SweepRow& r) { return r.strategy == "all"; });
      std::vector<std::size_t> ks;
      for (const auto& r : report.rows)
        if (r.strategy != "all" && std::find(ks.begin(), ks.end(), r.k) == ks.end()) ks.push_back(r.k);
      for (std::size_t k : ks) {
        out += std::to_string(k);
        for (const auto& s : report.strategies) {
          const auto it = std::find_if(report.rows.begin(), report.rows.end(), [&](const SweepRow& r) {
            return r.k == k && r.strategy == s;
          });
          out += "," + (it == report.rows.end() ? std::string() : metrics::format_double(it->dice));
        }
        out += "," + (all == report.rows.end() ? std::string() : metrics::format_double(all->dice)) + "\n";
      }
      return out;
    }
  }
  return out;
}

std::vector<SweepRow> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "k,strategy,dice,iou") throw Error("report CSV: bad header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) throw Error("report CSV: expected 4 cells in \"" + line + "\"");
    SweepRow row;
    try {
      row.k = std::stoul(cells[0]);
      row.strategy = cells[1];
      row.dice = std::stod(cells[2]);
      row.iou = std::stod(cells[3]);
    } catch (const std::exception&) {
      throw Error("report CSV: bad number in \"" + line + "\"");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dipe
