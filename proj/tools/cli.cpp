#include "cli.hpp"

#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "fdml/analysis.hpp"
#include "fdml/dml.hpp"
#include "fdml/error.hpp"
#include "fdml/keyvalue.hpp"
#include "fdml/report.hpp"
#include "fdml/synth.hpp"
#include "fdml/text_io.hpp"

namespace fdml::cli {

namespace {

struct Options {
  std::string input;
  std::string output_dir;
  std::string mapping;
  std::string schema;
  std::string config;
  std::string target = "goals";
  int folds = 5;
  std::optional<std::uint64_t> seed;
  std::string learner = "boosted";
  std::string se = "hc1";
  bool side_adjusted = false;
  bool tune = false;
  LearnerParams params;

  // ingest
  std::string delimiter = ",";
  int drop_first = 2;
  int drop_last = 4;
  std::vector<std::string> stage_labels;

  // simulate
  bool null = false;
  int teams = 20;
  int seasons = 5;
  int leagues = 2;
  double confounding = 2.0;
  double noise_sd = 0.4;
  double home_advantage = 0.285;
  double strength_effect = 0.3;
  bool no_weather = false;

  // report
  std::string beta;
  std::string pvalue;
};

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::config, msg); }

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = parse_double(value)) return *v;
  } else {
    if (auto v = parse_int(value); v && *v >= 0) return static_cast<T>(*v);
  }
  config_error("config key '" + key + "': bad value '" + value + "'");
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = to_lower(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  config_error("config key '" + key + "': expected true/false, got '" + value + "'");
}

// key=value lines override whatever the flags said.
void apply_config_file(Options& o) {
  if (o.config.empty()) return;
  const KeyValueMap kv = read_key_value_file(o.config);
  const std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters{
      {"input", [&](auto&, auto& v) { o.input = v; }},
      {"output_dir", [&](auto&, auto& v) { o.output_dir = v; }},
      {"mapping", [&](auto&, auto& v) { o.mapping = v; }},
      {"schema", [&](auto&, auto& v) { o.schema = v; }},
      {"target", [&](auto&, auto& v) { o.target = v; }},
      {"folds", [&](auto& k, auto& v) { o.folds = parse_number<int>(k, v); }},
      {"seed", [&](auto& k, auto& v) { o.seed = parse_number<std::uint64_t>(k, v); }},
      {"learner", [&](auto&, auto& v) { o.learner = v; }},
      {"se", [&](auto&, auto& v) { o.se = v; }},
      {"side_adjusted", [&](auto& k, auto& v) { o.side_adjusted = parse_bool(k, v); }},
      {"tune", [&](auto& k, auto& v) { o.tune = parse_bool(k, v); }},
      {"max_depth", [&](auto& k, auto& v) { o.params.max_depth = parse_number<int>(k, v); }},
      {"n_stages", [&](auto& k, auto& v) { o.params.n_stages = parse_number<int>(k, v); }},
      {"learning_rate", [&](auto& k, auto& v) { o.params.learning_rate = parse_number<double>(k, v); }},
      {"min_samples_leaf", [&](auto& k, auto& v) { o.params.min_samples_leaf = parse_number<int>(k, v); }},
      {"subsample", [&](auto& k, auto& v) { o.params.subsample_fraction = parse_number<double>(k, v); }},
      {"ridge_lambda", [&](auto& k, auto& v) { o.params.ridge_lambda = parse_number<double>(k, v); }},
      {"delimiter", [&](auto&, auto& v) { o.delimiter = v; }},
      {"drop_first", [&](auto& k, auto& v) { o.drop_first = parse_number<int>(k, v); }},
      {"drop_last", [&](auto& k, auto& v) { o.drop_last = parse_number<int>(k, v); }},
      {"null", [&](auto& k, auto& v) { o.null = parse_bool(k, v); }},
      {"teams", [&](auto& k, auto& v) { o.teams = parse_number<int>(k, v); }},
      {"seasons", [&](auto& k, auto& v) { o.seasons = parse_number<int>(k, v); }},
      {"leagues", [&](auto& k, auto& v) { o.leagues = parse_number<int>(k, v); }},
      {"confounding", [&](auto& k, auto& v) { o.confounding = parse_number<double>(k, v); }},
      {"noise_sd", [&](auto& k, auto& v) { o.noise_sd = parse_number<double>(k, v); }},
      {"home_advantage", [&](auto& k, auto& v) { o.home_advantage = parse_number<double>(k, v); }},
      {"strength_effect", [&](auto& k, auto& v) { o.strength_effect = parse_number<double>(k, v); }},
      {"weather", [&](auto& k, auto& v) { o.no_weather = !parse_bool(k, v); }},
      {"beta", [&](auto&, auto& v) { o.beta = v; }},
      {"pvalue", [&](auto&, auto& v) { o.pvalue = v; }},
  };
  for (const auto& [key, value] : kv) {
    auto it = setters.find(key);
    if (it == setters.end()) config_error("unknown config key '" + key + "' in " + o.config);
    it->second(key, value);
  }
}

std::filesystem::path output_dir(const Options& o) {
  if (!o.output_dir.empty()) return o.output_dir;
  if (const char* env = std::getenv("FDML_OUTPUT_DIR"); env && *env) return env;
  return "fdml_out";
}

void require_input(const Options& o) {
  if (o.input.empty()) config_error("--input is required");
}

Target target_of(const Options& o) {
  auto t = parse_target(o.target);
  if (!t) config_error("unknown target '" + o.target + "'");
  return *t;
}

FormationMapping mapping_of(const Options& o) {
  return o.mapping.empty() ? FormationMapping::defaults() : FormationMapping::from_file(o.mapping);
}

int cmd_ingest(const Options& o, std::ostream& out) {
  require_input(o);
  if (o.delimiter.size() != 1) config_error("--delimiter must be a single character");
  const ColumnSchema schema =
      o.schema.empty() ? ColumnSchema::identity() : ColumnSchema::from_key_values(read_key_value_file(o.schema));
  const FixtureParseResult parsed = parse_fixture_table(o.input, schema, o.delimiter[0]);

  PrepareOptions prep;
  prep.target = target_of(o);
  prep.drop_first = o.drop_first;
  prep.drop_last = o.drop_last;
  for (const auto& s : o.stage_labels) prep.regular_stage_labels.push_back(s);
  PrepareLog log;
  const AnalysisTable table = prepare_analysis(parsed.fixtures, mapping_of(o), prep, &log);

  const auto dir = output_dir(o);
  ensure_directory(dir);
  write_analysis_table(dir / "analysis.csv", table);
  write_reject_report(dir / "rejects.csv", parsed.rejects);

  out << "rows read: " << parsed.fixtures.size() + parsed.rejects.size() << "\n";
  out << "rejected: " << parsed.rejects.size() << "\n";
  out << "fixtures after validation: " << log.input_fixtures << "\n";
  out << "fixtures after stage filter: " << log.after_stage_filter << "\n";
  out << "fixtures after round filter: " << log.after_round_filter << "\n";
  out << "analysis rows: " << log.analysis_rows << "\n";
  for (const auto& [partition, range] : log.retained_rounds)
    out << "retained rounds " << partition << ": " << range.first << "-" << range.second << "\n";
  out << "wrote " << (dir / "analysis.csv").string() << "\n";
  return 0;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  SynthConfig c = default_synth_config();
  c.n_teams = o.teams;
  c.n_seasons = o.seasons;
  c.n_leagues = o.leagues;
  c.confounding_strength = o.confounding;
  c.noise_sd = o.noise_sd;
  c.home_advantage = o.home_advantage;
  c.strength_effect = o.strength_effect;
  c.weather = !o.no_weather;
  if (o.seed) c.seed = *o.seed;
  if (o.null) c.true_beta = SquareGrid<double>(c.k, 0.0);

  const SynthResult r = generate(c, mapping_of(o));
  const auto dir = output_dir(o);
  ensure_directory(dir);
  write_fixture_table(dir / "fixtures.csv", r.fixtures);
  write_truth_file(dir / "truth.csv", r.truth);

  out << "fixtures: " << r.fixtures.size() << "\n";
  out << "home_advantage: " << format_double(r.truth.home_advantage) << "\n";
  out << "true_beta:\n" << grid_to_csv(r.truth.true_beta, 2);
  out << "wrote " << (dir / "fixtures.csv").string() << " and " << (dir / "truth.csv").string() << "\n";
  return 0;
}

int cmd_estimate(const Options& o, std::ostream& out) {
  require_input(o);
  const Target target = target_of(o);
  const AnalysisTable table = read_analysis_table(o.input, target);

  RunConfig rc;
  rc.target = target;
  rc.n_folds = o.folds;
  if (o.seed) rc.seed = *o.seed;
  auto kind = parse_learner(o.learner);
  if (!kind) config_error("unknown learner '" + o.learner + "'");
  rc.learner.kind = *kind;
  rc.learner.params = o.params;
  auto se = parse_se_variant(o.se);
  if (!se) config_error("unknown standard-error variant '" + o.se + "'");
  rc.se_variant = *se;
  rc.tune_outcome = o.tune;

  const PipelineResult result = run_pipeline(table, rc);
  const auto dir = output_dir(o);
  write_run_artifacts(dir, result, rc, o.side_adjusted);
  out << render_matrix_text(result.matrix, {.side_adjusted = o.side_adjusted});
  out << "wrote " << dir.string() << "\n";
  return 0;
}

int cmd_report(const Options& o, std::ostream& out) {
  require_input(o);
  const AnalysisTable table = read_analysis_table(o.input, target_of(o));
  if (table.rows.empty()) throw Error(ErrorCode::empty_table, "analysis table '" + o.input + "' has no rows");

  const auto dir = output_dir(o);
  ensure_directory(dir);
  const auto usage = formation_usage(table.rows);
  write_text_file(dir / "usage.csv", usage_to_csv(usage));
  write_text_file(dir / "averages.csv", averages_to_csv(formation_averages(table.rows)));
  out << usage_to_csv(usage);

  if (!o.beta.empty()) {
    const auto beta = read_grid_csv(o.beta);
    const auto p = o.pvalue.empty() ? SquareGrid<double>(beta.k(), 1.0) : read_grid_csv(o.pvalue);
    if (p.k() != beta.k()) throw Error(ErrorCode::dimension, "beta and p-value grids differ in size");
    HeatmapOptions h;
    h.title = std::filesystem::path(o.beta).stem().string();
    write_text_file(dir / "heatmap.svg", render_heatmap_svg(beta, p, {beta.k(), beta.k()}, h));
  }
  out << "wrote " << dir.string() << "\n";
  return 0;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--input", o.input, "Input file");
  cmd->add_option("--output-dir", o.output_dir, "Output directory (default: $FDML_OUTPUT_DIR or fdml_out)");
  cmd->add_option("--config", o.config, "key=value file overriding flags");
  cmd->add_option("--mapping", o.mapping, "Raw formation -> group table");
  cmd->add_option("--target", o.target, "goals|red_cards|yellow_cards|possession|corners");
  cmd->add_option("--seed", o.seed, "Random seed");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Formation effects via cross-fitted double machine learning"};
  app.require_subcommand(1, 1);

  auto* ingest = app.add_subcommand("ingest", "Validate fixtures and build the analysis table");
  add_common(ingest, o);
  ingest->add_option("--schema", o.schema, "Column mapping file (canonical = source)");
  ingest->add_option("--delimiter", o.delimiter, "Field delimiter");
  ingest->add_option("--drop-first", o.drop_first, "Leading rounds dropped per season");
  ingest->add_option("--drop-last", o.drop_last, "Trailing rounds dropped per season");
  ingest->add_option("--stage-label", o.stage_labels, "Extra stage labels counted as regular season");

  auto* simulate = app.add_subcommand("simulate", "Generate synthetic fixtures with a known truth");
  add_common(simulate, o);
  simulate->add_flag("--null", o.null, "All-zero true effects");
  simulate->add_option("--teams", o.teams);
  simulate->add_option("--seasons", o.seasons);
  simulate->add_option("--leagues", o.leagues);
  simulate->add_option("--confounding", o.confounding);
  simulate->add_option("--noise-sd", o.noise_sd);
  simulate->add_option("--home-advantage", o.home_advantage);
  simulate->add_option("--strength-effect", o.strength_effect);
  simulate->add_flag("--no-weather", o.no_weather);

  auto* estimate = app.add_subcommand("estimate", "Estimate the formation effect matrix");
  add_common(estimate, o);
  estimate->add_option("--folds", o.folds, "Cross-fitting folds");
  estimate->add_option("--learner", o.learner, "boosted|ridge");
  estimate->add_option("--se", o.se, "hc0|hc1|hc3|cluster");
  estimate->add_flag("--side-adjusted", o.side_adjusted, "Shift displayed cells by the home effect");
  estimate->add_flag("--tune", o.tune, "Grid-search the outcome learner first");
  estimate->add_option("--max-depth", o.params.max_depth);
  estimate->add_option("--n-stages", o.params.n_stages);
  estimate->add_option("--learning-rate", o.params.learning_rate);
  estimate->add_option("--min-samples-leaf", o.params.min_samples_leaf);
  estimate->add_option("--subsample", o.params.subsample_fraction);
  estimate->add_option("--ridge-lambda", o.params.ridge_lambda);

  auto* report = app.add_subcommand("report", "Formation usage, averages and heatmap");
  add_common(report, o);
  report->add_option("--beta", o.beta, "Grid to draw as a heatmap");
  report->add_option("--pvalue", o.pvalue, "Matching p-value grid for star annotations");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[" << code_name(ErrorCode::config) << "]: " << e.what() << "\n";
    return 2;
  }

  try {
    apply_config_file(o);
    if (ingest->parsed()) return cmd_ingest(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (estimate->parsed()) return cmd_estimate(o, out);
    return cmd_report(o, out);
  } catch (const Error& e) {
    err << "error[" << code_name(e.code()) << "]: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error[E_INTERNAL]: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace fdml::cli
