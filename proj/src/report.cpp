#include "fdml/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fdml/formation.hpp"
#include "fdml/text_io.hpp"

namespace fdml {

std::string format_cell(double value, double p, int digits) {
  const std::string_view stars = significance_stars(p);
  std::string out = format_fixed(value, digits);
  if (stars != "ns") out += stars;
  return out;
}

std::string render_matrix_text(const BetaMatrix& matrix, const RenderOptions& options) {
  const int k = matrix.k;
  const SquareGrid<double> values = options.side_adjusted ? side_adjust(matrix) : matrix.displayed();
  SquareGrid<std::string> cells(k);
  std::size_t width = 7;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      std::string c = i == j && !options.side_adjusted ? format_fixed(0.0, options.digits)
                                                       : format_cell(values(i, j), matrix.p(i, j), options.digits);
      if (TreatmentCell{i + 1, j + 1} == matrix.omitted) c = "[" + c + "]";
      width = std::max(width, c.size());
      cells(i, j) = std::move(c);
    }
  for (int j = 0; j < k; ++j) width = std::max(width, grid_label(j, k).size());
  const std::string corner = "main\\rival";
  width = std::max(width, corner.size());

  auto pad = [&](const std::string& s) { return std::string(width + 1 - std::min(width, s.size()), ' ') + s; };
  std::string out = pad(corner);
  for (int j = 0; j < k; ++j) out += pad(grid_label(j, k));
  out += '\n';
  for (int i = 0; i < k; ++i) {
    out += pad(grid_label(i, k));
    for (int j = 0; j < k; ++j) out += pad(cells(i, j));
    out += '\n';
  }
  out += "home effect: " + format_fixed(matrix.home_effect, 3) + (options.side_adjusted ? " (added)" : "") + '\n';
  return out;
}

namespace {

std::string rgb(double value, double scale) {
  // 0 -> white, +scale -> red, -scale -> blue
  const double t = scale > 0 ? std::clamp(value / scale, -1.0, 1.0) : 0.0;
  int r = 255, g = 255, b = 255;
  if (t > 0) {
    g = b = static_cast<int>(std::lround(255 * (1 - t)));
    r = static_cast<int>(std::lround(255 - 75 * t));
  } else if (t < 0) {
    r = g = static_cast<int>(std::lround(255 * (1 + t)));
    b = static_cast<int>(std::lround(255 + 75 * t));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_heatmap_svg(const SquareGrid<double>& values, const SquareGrid<double>& p, TreatmentCell omitted,
                               const HeatmapOptions& options) {
  const int k = values.k();
  constexpr int cell = 70, left = 90, top = 60;
  const int w = left + k * cell + 20, h = top + k * cell + 50;
  double scale = 0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) scale = std::max(scale, std::abs(values(i, j)));

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
                    std::to_string(h) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty())
    svg += "<text x=\"" + std::to_string(w / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
           xml_escape(options.title) + "</text>\n";
  for (int j = 0; j < k; ++j)
    svg += "<text x=\"" + std::to_string(left + j * cell + cell / 2) + "\" y=\"" + std::to_string(top - 8) +
           "\" text-anchor=\"middle\">" + xml_escape(grid_label(j, k)) + "</text>\n";
  for (int i = 0; i < k; ++i) {
    const int y = top + i * cell;
    svg += "<text x=\"" + std::to_string(left - 8) + "\" y=\"" + std::to_string(y + cell / 2 + 4) +
           "\" text-anchor=\"end\">" + xml_escape(grid_label(i, k)) + "</text>\n";
    for (int j = 0; j < k; ++j) {
      const int x = left + j * cell;
      const bool ref = TreatmentCell{i + 1, j + 1} == omitted;
      svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
             std::to_string(cell) + "\" height=\"" + std::to_string(cell) + "\" fill=\"" + rgb(values(i, j), scale) +
             "\" stroke=\"" + (ref ? "black\" stroke-width=\"3" : "#cccccc\" stroke-width=\"1") + "\"/>\n";
      svg += "<text x=\"" + std::to_string(x + cell / 2) + "\" y=\"" + std::to_string(y + cell / 2 + 4) +
             "\" text-anchor=\"middle\">" + xml_escape(format_cell(values(i, j), p(i, j), options.digits)) +
             "</text>\n";
    }
  }
  svg += "<text x=\"" + std::to_string(left) + "\" y=\"" + std::to_string(h - 15) +
         "\">rows: main formation, columns: rival; * p&lt;0.05 ** p&lt;0.01 *** p&lt;0.001</text>\n";
  svg += "</svg>\n";
  return svg;
}

std::map<std::string, std::vector<double>> formation_usage(std::span<const AnalysisRow> rows) {
  std::map<std::string, std::vector<double>> usage;
  std::map<std::string, long> totals;
  for (const auto& r : rows) {
    auto& u = usage[r.league];
    u.resize(kGroupCount, 0.0);
    u[static_cast<std::size_t>(r.cell.main - 1)] += 1;
    ++totals[r.league];
  }
  for (auto& [league, u] : usage)
    for (double& v : u) v = 100.0 * v / static_cast<double>(totals[league]);
  return usage;
}

FormationAverages formation_averages(std::span<const AnalysisRow> rows) {
  FormationAverages a;
  for (auto* v : {&a.goals, &a.red_cards, &a.yellow_cards, &a.possession, &a.corners}) v->assign(kGroupCount, 0.0);
  a.appearances.assign(kGroupCount, 0);
  for (const auto& r : rows) {
    const auto g = static_cast<std::size_t>(r.cell.main - 1);
    a.goals[g] += r.main_stats.goals;
    a.red_cards[g] += r.main_stats.red_cards;
    a.yellow_cards[g] += r.main_stats.yellow_cards;
    a.possession[g] += r.main_stats.possession;
    a.corners[g] += r.main_stats.corners;
    ++a.appearances[g];
  }
  for (std::size_t g = 0; g < a.appearances.size(); ++g) {
    if (a.appearances[g] == 0) continue;
    const double n = static_cast<double>(a.appearances[g]);
    for (auto* v : {&a.goals, &a.red_cards, &a.yellow_cards, &a.possession, &a.corners}) (*v)[g] /= n;
  }
  return a;
}

std::string usage_to_csv(const std::map<std::string, std::vector<double>>& usage) {
  std::string out = "league";
  for (auto l : kGroupLabels) out += "," + std::string(l);
  out += '\n';
  for (const auto& [league, u] : usage) {
    out += join_record({league}, ',');
    for (double v : u) out += "," + format_fixed(v, 2);
    out += '\n';
  }
  return out;
}

std::string averages_to_csv(const FormationAverages& a) {
  std::string out = "group,appearances,goals,red_cards,yellow_cards,possession,corners\n";
  for (std::size_t g = 0; g < a.appearances.size(); ++g) {
    out += std::string(kGroupLabels[g]) + "," + std::to_string(a.appearances[g]);
    for (const auto* v : {&a.goals, &a.red_cards, &a.yellow_cards, &a.possession, &a.corners})
      out += "," + format_fixed((*v)[g], 3);
    out += '\n';
  }
  return out;
}

namespace {

std::string config_text(const RunConfig& c, bool side_adjusted) {
  const auto& p = c.learner.params;
  std::string out;
  auto kv = [&](std::string_view k, const std::string& v) { out += std::string(k) + "=" + v + "\n"; };
  kv("target", std::string(target_name(c.target)));
  kv("folds", std::to_string(c.n_folds));
  kv("seed", std::to_string(c.seed));
  kv("learner", std::string(learner_name(c.learner.kind)));
  kv("max_depth", std::to_string(p.max_depth));
  kv("n_stages", std::to_string(p.n_stages));
  kv("learning_rate", format_double(p.learning_rate));
  kv("min_samples_leaf", std::to_string(p.min_samples_leaf));
  kv("subsample", format_double(p.subsample_fraction));
  kv("ridge_lambda", format_double(p.ridge_lambda));
  kv("se", std::string(se_variant_name(c.se_variant)));
  kv("k", std::to_string(c.encoding.k));
  kv("reference", to_string(c.encoding.reference()));
  kv("tune", c.tune_outcome ? "true" : "false");
  kv("side_adjusted", side_adjusted ? "true" : "false");
  return out;
}

std::string r2_text(const FitReport& r) { return r.r2 ? format_double(*r.r2) : std::string{"NA"}; }

}  // namespace

void write_run_artifacts(const std::filesystem::path& dir, const PipelineResult& result, const RunConfig& config,
                         bool side_adjusted) {
  ensure_directory(dir);
  const BetaMatrix& m = result.matrix;
  const Diagnostics& d = result.diagnostics;

  write_text_file(dir / "config.txt", config_text(config, side_adjusted));
  write_text_file(dir / "beta.csv", grid_to_csv(m.beta));
  write_text_file(dir / "beta_display.csv", grid_to_csv(m.displayed()));
  write_text_file(dir / "beta_side.csv", grid_to_csv(side_adjust(m)));
  write_text_file(dir / "se.csv", grid_to_csv(m.se));
  write_text_file(dir / "pvalue.csv", grid_to_csv(m.p));
  write_text_file(dir / "stars.csv", grid_to_csv(m.stars));
  write_text_file(dir / "counts.csv", grid_to_csv(m.cell_counts));
  write_text_file(dir / "matrix.txt", render_matrix_text(m, {.side_adjusted = side_adjusted}));

  HeatmapOptions h;
  h.title = std::string(target_name(config.target)) + (side_adjusted ? " (side-adjusted)" : "");
  write_text_file(dir / "heatmap.svg",
                  render_heatmap_svg(side_adjusted ? side_adjust(m) : m.displayed(), m.p, m.omitted, h));

  std::string res = "series,n,mean,sd\n";
  auto summarize = [&](const std::string& name, const Eigen::VectorXd& v) {
    const double n = static_cast<double>(v.size());
    const double mean = n > 0 ? v.mean() : 0.0;
    const double sd = n > 1 ? std::sqrt((v.array() - mean).square().sum() / (n - 1)) : 0.0;
    res += join_record({name}, ',') + "," + std::to_string(v.size()) + "," + format_double(mean) + "," +
           format_double(sd) + "\n";
  };
  summarize("Y", result.residuals.r_y);
  for (Eigen::Index c = 0; c < result.residuals.r_d.cols(); ++c) {
    const std::size_t idx = static_cast<std::size_t>(c) + 1;
    const std::string name = idx < result.residuals.first_stage.size() ? result.residuals.first_stage[idx].name
                                                                       : "D" + std::to_string(c);
    summarize(name, result.residuals.r_d.col(c));
  }
  write_text_file(dir / "residual_summary.csv", res);

  std::string fs = "model,oof_mse,oof_r2\n";
  for (const auto& f : d.first_stage)
    fs += join_record({f.name}, ',') + "," + format_double(f.report.mse) + "," + r2_text(f.report) + "\n";
  write_text_file(dir / "first_stage.csv", fs);

  std::string diag;
  diag += "rows=" + std::to_string(result.residuals.r_y.size()) + "\n";
  diag += "antisymmetry_gap=" + format_double(d.antisymmetry_gap) + "\n";
  diag += "raw_diagonal=";
  for (std::size_t i = 0; i < d.raw_diagonal.size(); ++i) diag += (i ? "," : "") + format_double(d.raw_diagonal[i]);
  diag += "\nhome_effect=" + format_double(m.home_effect) + "\n";
  diag += "max_orthogonality=" + format_double(d.max_orthogonality) + "\n";
  for (const auto& o : d.orthogonality)
    diag += "orthogonality " + o.residual + " " + o.confounder + " " + format_double(o.max_abs_corr) + "\n";
  if (d.tuned_outcome_params) {
    const auto& p = *d.tuned_outcome_params;
    diag += "tuned_outcome=max_depth:" + std::to_string(p.max_depth) + " n_stages:" + std::to_string(p.n_stages) +
            " ridge_lambda:" + format_double(p.ridge_lambda) + "\n";
  }
  if (d.tuning_report) diag += "tuning_cv_mse=" + format_double(d.tuning_report->mse) + " tuning_oof_r2=" +
                               r2_text(*d.tuning_report) + "\n";
  write_text_file(dir / "diagnostics.txt", diag);
}

}  // namespace fdml
