#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dipe/correlation.hpp"
#include "dipe/error.hpp"
#include "dipe/fusion.hpp"
#include "dipe/manifest.hpp"
#include "dipe/metrics.hpp"
#include "dipe/report.hpp"
#include "dipe/selection.hpp"
#include "dipe/synth.hpp"
#include "dipe/tensor_io.hpp"
#include "dipe/validation_set.hpp"

namespace dipe::cli {

namespace {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel log_level_from_env() {
  const char* raw = std::getenv("DIPE_LOG");
  if (!raw) return LogLevel::warn;
  const std::string v(raw);
  if (v == "error") return LogLevel::error;
  if (v == "info") return LogLevel::info;
  if (v == "debug") return LogLevel::debug;
  return LogLevel::warn;
}

class Logger {
 public:
  explicit Logger(std::ostream& err) : err_(err), level_(log_level_from_env()) {}
  void info(const std::string& msg) const { emit(LogLevel::info, "info", msg); }
  void debug(const std::string& msg) const { emit(LogLevel::debug, "debug", msg); }

 private:
  void emit(LogLevel level, const char* tag, const std::string& msg) const {
    if (level <= level_) err_ << "dipe [" << tag << "] " << msg << "\n";
  }
  std::ostream& err_;
  LogLevel level_;
};

/// Shared by subcommands that read predictions.
struct CommonOptions {
  double threshold = metrics::kDefaultThreshold;
  int threads = 0;

  ExecConfig exec() const { return ExecConfig{threads}; }
};

void add_common(CLI::App* sub, CommonOptions& common) {
  sub->add_option("--threshold", common.threshold, "Probability threshold for masks (default 0.5)");
  sub->add_option("--threads", common.threads, "Worker threads (default: hardware count)");
}

std::string read_text(const std::string& path) {
  const auto bytes = io::read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_text_file(path, text);
  }
}

ValidationSet load_set(const std::string& manifest_path, const CommonOptions& common, const Logger& log) {
  metrics::check_threshold(common.threshold);
  const Manifest manifest = load_manifest(manifest_path);
  log.info("manifest " + manifest_path + ": " + std::to_string(manifest.models.size()) + " models, " +
           std::to_string(manifest.slices.size()) + " slices");
  return ValidationSet::load(manifest, common.exec());
}

std::size_t parse_budget(const std::string& text) {
  long long k = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw CLI::ValidationError("--k", "expected an integer, got \"" + text + "\"");
  }
  if (k < 1) throw ContractError("k out of range: k = " + text + ", expected k >= 1");
  return static_cast<std::size_t>(k);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diversity-promoting ensemble selection for segmentation models", "dipe"};
  app.require_subcommand(1);
  const Logger log(err);

  CommonOptions common;

  // eval
  std::string manifest_path, out_path;
  auto* eval = app.add_subcommand("eval", "Score every model against ground truth (JSON)");
  eval->add_option("--manifest", manifest_path, "Manifest JSON")->required();
  eval->add_option("--out", out_path, "Output file (default: stdout)");
  add_common(eval, common);

  // corr
  std::string pgm_path;
  auto* corr = app.add_subcommand("corr", "Pairwise Dice correlation matrix (CSV + PGM)");
  corr->add_option("--manifest", manifest_path, "Manifest JSON")->required();
  corr->add_option("--out", out_path, "CSV output path")->required();
  corr->add_option("--pgm", pgm_path, "PGM heatmap path (default: CSV path with .pgm)");
  add_common(corr, common);

  // select
  std::string strategy_name = "dipe", k_text, corr_path, scores_path;
  auto* sel = app.add_subcommand("select", "Select an ensemble (JSON with trace)");
  sel->add_option("--strategy", strategy_name, "dipe, dipe-ablated, topk, all or exhaustive");
  sel->add_option("--k", k_text, "Budget (number of models)");
  sel->add_option("--corr", corr_path, "Correlation CSV from `dipe corr`");
  sel->add_option("--scores", scores_path, "Scores JSON from `dipe eval`");
  sel->add_option("--manifest", manifest_path, "Manifest JSON (exhaustive strategy only)");
  sel->add_option("--out", out_path, "Output file (default: stdout)");
  add_common(sel, common);

  // fuse
  std::string members_text, selection_path;
  bool write_probs = false;
  auto* fuse_cmd = app.add_subcommand("fuse", "Soft-vote the selected models (RLE CSV, optional DIPE)");
  fuse_cmd->add_option("--manifest", manifest_path, "Manifest JSON")->required();
  auto* members_opt = fuse_cmd->add_option("--members", members_text, "Comma-separated model ids");
  auto* selection_opt = fuse_cmd->add_option("--selection", selection_path, "Selection JSON from `dipe select`");
  members_opt->excludes(selection_opt);
  fuse_cmd->add_option("--out", out_path, "Output directory")->required();
  fuse_cmd->add_flag("--probs", write_probs, "Also write fused probability maps");
  add_common(fuse_cmd, common);

  // report
  std::string strategies_text = "topk,dipe,dipe-ablated", format_name = "csv";
  auto* rep = app.add_subcommand("report", "Budget sweep comparing strategies");
  rep->add_option("--manifest", manifest_path, "Manifest JSON")->required();
  rep->add_option("--strategies", strategies_text, "Comma-separated strategies");
  rep->add_option("--k", k_text, "Budget range, e.g. 2..9 (default: 2..n)");
  rep->add_option("--out", out_path, "Output file (default: stdout)");
  rep->add_option("--format", format_name, "csv, table or series")->check(CLI::IsMember({"csv", "table", "series"}));
  add_common(rep, common);

  // synth
  std::string spec_path;
  auto* syn = app.add_subcommand("synth", "Generate a synthetic validation set and model zoo");
  syn->add_option("--spec", spec_path, "Synth spec JSON")->required();
  syn->add_option("--out", out_path, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (eval->parsed()) {
      const ValidationSet set = load_set(manifest_path, common, log);
      emit(metrics::scores_to_json(metrics::score_models(set, common.threshold, common.exec())), out_path, out);
    } else if (corr->parsed()) {
      const ValidationSet set = load_set(manifest_path, common, log);
      const CorrelationMatrix c = correlation_matrix(set, common.threshold, common.exec());
      io::write_text_file(out_path, correlation_to_csv(c));
      std::filesystem::path pgm = pgm_path.empty() ? std::filesystem::path(out_path).replace_extension(".pgm")
                                                   : std::filesystem::path(pgm_path);
      io::write_file(pgm, correlation_to_pgm(c));
      log.info("wrote " + out_path + " and " + pgm.string());
    } else if (sel->parsed()) {
      const auto strategy = parse_strategy(strategy_name);
      if (!strategy) {
        err << "unknown strategy \"" << strategy_name << "\"\n" << sel->help();
        return kExitUsage;
      }
      if (k_text.empty() && *strategy != Strategy::all) {
        err << "--k is required for strategy " << strategy_name << "\n";
        return kExitUsage;
      }
      const std::size_t k = k_text.empty() ? 0 : parse_budget(k_text);
      EnsembleSelection selection;
      std::vector<std::string> ids;
      if (*strategy == Strategy::exhaustive) {
        if (manifest_path.empty()) {
          err << "--manifest is required for strategy exhaustive\n";
          return kExitUsage;
        }
        const ValidationSet set = load_set(manifest_path, common, log);
        ids = set.model_ids();
        selection = select_exhaustive(set, k, common.threshold, common.exec());
      } else {
        if (corr_path.empty() || scores_path.empty()) {
          err << "--corr and --scores are required for strategy " << strategy_name << "\n";
          return kExitUsage;
        }
        const CorrelationMatrix c = correlation_from_csv(read_text(corr_path));
        const metrics::ModelScores scores = metrics::scores_from_json(read_text(scores_path));
        if (scores.model_ids != c.model_ids()) {
          throw Error("scores and correlation matrix list different models (or in a different order)");
        }
        ids = c.model_ids();
        selection = select(*strategy, c, scores.dice, *strategy == Strategy::all ? c.size() : k);
      }
      emit(selection_to_json(selection, ids), out_path, out);
    } else if (fuse_cmd->parsed()) {
      const ValidationSet set = load_set(manifest_path, common, log);
      std::vector<std::size_t> members;
      if (!selection_path.empty()) {
        members = selection_from_json(read_text(selection_path), set.model_ids()).members;
      } else {
        for (const auto& id : split_list(members_text)) members.push_back(set.model_index(id));
      }
      if (members.empty()) {
        err << "fuse needs --members or --selection\n";
        return kExitUsage;
      }
      export_fused(members, set, common.threshold, out_path, write_probs, common.exec());
      log.info("fused " + std::to_string(members.size()) + " models into " + out_path);
    } else if (rep->parsed()) {
      std::vector<Strategy> strategies;
      for (const auto& name : split_list(strategies_text)) {
        const auto s = parse_strategy(name);
        if (!s || *s == Strategy::all) {
          err << "unsupported report strategy \"" << name << "\"\n";
          return kExitUsage;
        }
        strategies.push_back(*s);
      }
      const ValidationSet set = load_set(manifest_path, common, log);
      KRange range = k_text.empty() ? KRange{2, set.model_count()} : parse_k_range(k_text);
      const SweepReport report = sweep(set, strategies, range, common.threshold, common.exec());
      const RenderFormat format = format_name == "table"    ? RenderFormat::table
                                  : format_name == "series" ? RenderFormat::series
                                                            : RenderFormat::csv;
      emit(render(report, format), out_path, out);
    } else if (syn->parsed()) {
      const synth::SynthSpec spec = synth::spec_from_json(read_text(spec_path));
      const Manifest manifest = synth::generate(spec, out_path);
      log.info("generated " + std::to_string(manifest.models.size()) + " models x " +
               std::to_string(manifest.slices.size()) + " slices in " + out_path);
    }
  } catch (const CLI::ValidationError& e) {
    err << "dipe: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "dipe: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace dipe::cli
