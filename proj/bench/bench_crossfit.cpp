// Serial vs OpenMP schedules for the two parallel kernels: cross-fitting and
// grid tuning. Both schedules produce identical numbers; only wall time differs.

#include <benchmark/benchmark.h>

#include <set>

#include "fdml/analysis.hpp"
#include "fdml/dml.hpp"
#include "fdml/encoding.hpp"
#include "fdml/synth.hpp"

using namespace fdml;

namespace {

struct Workload {
  AnalysisTable table;
  FeatureMatrix features;
  Eigen::VectorXd y;
  EffectCodedMatrix design;
  std::vector<std::string> ids;
};

const Workload& workload() {
  static const Workload w = [] {
    SynthConfig c = default_synth_config();
    c.n_leagues = 1;
    c.n_seasons = 4;
    AnalysisTable table = prepare_analysis(generate(c).fixtures, FormationMapping::defaults(), PrepareOptions{});
    std::vector<TreatmentCell> cells;
    for (const auto& r : table.rows) cells.push_back(r.cell);
    FeatureMatrix fm(table.confounder_matrix());
    Eigen::VectorXd y = table.outcomes();
    EffectCodedMatrix design = build_effect_coded_matrix(cells, EncodingSpec{6});
    std::vector<std::string> ids = table.fixture_ids();
    return Workload{std::move(table), std::move(fm), std::move(y), std::move(design), std::move(ids)};
  }();
  return w;
}

void cross_fit(benchmark::State& state, Schedule schedule) {
  const auto& w = workload();
  CrossFitOptions o;
  o.seed = 3;
  o.outcome_learner.params.n_stages = 30;
  o.treatment_learner = o.outcome_learner;
  o.schedule = schedule;
  for (auto _ : state) benchmark::DoNotOptimize(cross_fit_residuals(w.features, w.y, w.design, w.ids, o));
  state.counters["rows"] = static_cast<double>(w.y.size());
}

void tuning(benchmark::State& state, Schedule schedule) {
  const auto& w = workload();
  std::vector<LearnerParams> grid;
  for (int depth : {2, 3})
    for (double lr : {0.1, 0.2}) {
      LearnerParams p;
      p.max_depth = depth;
      p.learning_rate = lr;
      p.n_stages = 30;
      grid.push_back(p);
    }
  const std::span<const double> y(w.y.data(), static_cast<std::size_t>(w.y.size()));
  for (auto _ : state) benchmark::DoNotOptimize(tune(LearnerKind::boosted_trees, grid, w.features, y, 3, 11, schedule));
}

}  // namespace

BENCHMARK_CAPTURE(cross_fit, serial, Schedule::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(cross_fit, parallel, Schedule::parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(tuning, serial, Schedule::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(tuning, parallel, Schedule::parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
