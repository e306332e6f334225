#include "fdml/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "fdml/error.hpp"
#include "fdml/learners.hpp"
#include "fdml/strength.hpp"
#include "fdml/text_io.hpp"

namespace fdml {

namespace {

constexpr int kFirstSeasonYear = 2010;

// Round-robin pairings for one half-season: rounds x (home, away).
std::vector<std::vector<std::pair<int, int>>> circle_schedule(int n) {
  const int m = n % 2 == 0 ? n : n + 1;  // odd counts get a bye slot
  std::vector<int> slots(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) slots[static_cast<std::size_t>(i)] = i;
  std::vector<std::vector<std::pair<int, int>>> rounds;
  for (int r = 0; r < m - 1; ++r) {
    std::vector<std::pair<int, int>> games;
    for (int i = 0; i < m / 2; ++i) {
      int a = slots[static_cast<std::size_t>(i)];
      int b = slots[static_cast<std::size_t>(m - 1 - i)];
      if (a >= n || b >= n) continue;
      // Alternate venue so no team is always at home.
      if ((r + i) % 2 == 1) std::swap(a, b);
      games.emplace_back(a, b);
    }
    rounds.push_back(std::move(games));
    std::rotate(slots.begin() + 1, slots.end() - 1, slots.end());
  }
  return rounds;
}

int sample_group(std::mt19937_64& rng, int k, double tilt) {
  std::vector<double> w(static_cast<std::size_t>(k));
  const double half = (k - 1) / 2.0;
  for (int g = 0; g < k; ++g) w[static_cast<std::size_t>(g)] = std::exp(tilt * (g - half) / half);
  std::discrete_distribution<int> pick(w.begin(), w.end());
  return pick(rng) + 1;
}

// Winner's count is the loser's Poisson draw plus |d|.
std::pair<double, double> count_pair(std::mt19937_64& rng, double base_mean, long d) {
  std::poisson_distribution<int> base(base_mean);
  const double low = base(rng);
  return d >= 0 ? std::pair{low + static_cast<double>(d), low} : std::pair{low, low - static_cast<double>(d)};
}

std::string two_digit(int v) { return (v < 10 ? "0" : "") + std::to_string(v); }

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::config, "synth: " + msg); };
  if (n_teams < 2) fail("n_teams must be at least 2");
  if (n_seasons < 1) fail("n_seasons must be at least 1");
  if (n_leagues < 1) fail("n_leagues must be at least 1");
  if (k < 2 || k > kGroupCount) fail("k must be in [2, " + std::to_string(kGroupCount) + "]");
  if (true_beta.k() != k) fail("true_beta must be " + std::to_string(k) + " x " + std::to_string(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (std::abs(true_beta(i, j) + true_beta(j, i)) > 1e-12)
        fail("true_beta must be antisymmetric; cell (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
             ") breaks it");
  if (!(noise_sd > 0)) fail("noise_sd must be positive");
  if (!(confounding_strength >= 0)) fail("confounding_strength must be non-negative");
}

TargetEffect SynthConfig::effect(Target target) const {
  switch (target) {
    case Target::goals:
      return {1.0, home_advantage, strength_effect, noise_sd};
    case Target::corners:
      return {2.0, 0.8, 1.0, 1.5};
    case Target::possession:
      return {10.0, 2.0, 6.0, 6.0};
    case Target::yellow_cards:
      return {-1.0, -0.2, -0.3, 0.8};
    case Target::red_cards:
      return {0.0, 0.0, 0.0, 0.3};
  }
  return {};
}

SquareGrid<double> demo_true_beta(int k) {
  SquareGrid<double> b(k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      // main i is more defensive than rival j
      const double v = 0.1 * ((j - i) % 4);
      b(j, i) = v;
      b(i, j) = -v;
    }
  return b;
}

SynthConfig default_synth_config() {
  SynthConfig c;
  c.true_beta = demo_true_beta(c.k);
  return c;
}

const SquareGrid<double>& oracle_beta(const SynthConfig& config) { return config.true_beta; }

SynthResult generate(const SynthConfig& config, const FormationMapping& mapping) {
  config.validate();

  std::vector<std::vector<std::string>> raws(static_cast<std::size_t>(config.k));
  for (const auto& [raw, group] : mapping.entries())
    if (group.index() <= config.k) raws[static_cast<std::size_t>(group.index() - 1)].push_back(raw);
  for (int g = 0; g < config.k; ++g)
    if (raws[static_cast<std::size_t>(g)].empty())
      raws[static_cast<std::size_t>(g)].emplace_back(FormationGroup::from_index(g + 1).label());

  std::map<Target, TargetEffect> effects;
  for (Target t : kAllTargets) effects[t] = config.effect(t);

  const auto half = circle_schedule(config.n_teams);
  const int half_rounds = static_cast<int>(half.size());

  SynthResult out;
  out.fixtures.reserve(static_cast<std::size_t>(config.fixture_count()));

  for (int l = 0; l < config.n_leagues; ++l) {
    const std::string league = "League " + std::string(1, static_cast<char>('A' + l % 26)) +
                               (l >= 26 ? std::to_string(l / 26) : "");
    for (int s = 0; s < config.n_seasons; ++s) {
      std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(l) * 100003u + static_cast<std::uint64_t>(s)));
      std::normal_distribution<double> std_normal(0.0, 1.0);
      std::uniform_int_distribution<int> day_offset(0, 2);
      std::uniform_real_distribution<double> unit(0.0, 1.0);

      const int year = kFirstSeasonYear + s;
      const std::string season = std::to_string(year) + "-" + std::to_string(year + 1);

      std::vector<std::string> names;
      std::vector<double> latent;
      for (int t = 0; t < config.n_teams; ++t) {
        names.push_back("L" + std::to_string(l + 1) + "T" + two_digit(t + 1));
        latent.push_back(std_normal(rng));
      }
      std::map<std::string, std::size_t> team_of;
      for (std::size_t t = 0; t < names.size(); ++t) team_of[names[t]] = t;
      std::vector<int> order(static_cast<std::size_t>(config.n_teams));
      for (int t = 0; t < config.n_teams; ++t) order[static_cast<std::size_t>(t)] = t;
      std::sort(order.begin(), order.end(), [&](int a, int b) { return latent[a] > latent[b]; });
      std::vector<bool> cl(static_cast<std::size_t>(config.n_teams), false);
      for (int i = 0; i < std::min(2, config.n_teams); ++i) cl[static_cast<std::size_t>(order[i])] = true;

      const std::chrono::sys_days start{std::chrono::year{year} / std::chrono::August / 10};
      StrengthTracker tracker;

      for (int r = 0; r < 2 * half_rounds; ++r) {
        const bool second = r >= half_rounds;
        const auto& games = half[static_cast<std::size_t>(r % half_rounds)];
        std::vector<Fixture> round;
        for (std::size_t gi = 0; gi < games.size(); ++gi) {
          auto [h, a] = games[gi];
          if (second) std::swap(h, a);
          Fixture f;
          f.fixture_id = "L" + std::to_string(l + 1) + "-" + std::to_string(year) + "-R" + two_digit(r + 1) + "-" +
                         two_digit(static_cast<int>(gi) + 1);
          f.season = season;
          f.league = league;
          f.round = r + 1;
          f.date = std::chrono::year_month_day{start + std::chrono::days{7 * r + day_offset(rng)}};
          f.stage = "regular";
          f.home.team = names[static_cast<std::size_t>(h)];
          f.away.team = names[static_cast<std::size_t>(a)];
          f.home.cl_flag = cl[static_cast<std::size_t>(h)];
          f.away.cl_flag = cl[static_cast<std::size_t>(a)];
          round.push_back(std::move(f));
        }
        std::stable_sort(round.begin(), round.end(), [](const Fixture& x, const Fixture& y) {
          return std::chrono::sys_days{x.date} < std::chrono::sys_days{y.date};
        });

        // Formation choice sees only standings entering the date; results
        // are recorded once the whole date has been played.
        std::size_t begin = 0;
        while (begin < round.size()) {
          std::size_t end = begin;
          while (end < round.size() && round[end].date == round[begin].date) ++end;
          for (std::size_t i = begin; i < end; ++i) {
            Fixture& f = round[i];
            const double pr_h = tracker.features(f.home.team, true, f.home.cl_flag).points_ratio_overall;
            const double pr_a = tracker.features(f.away.team, false, f.away.cl_flag).points_ratio_overall;
            const int gh = sample_group(rng, config.k, config.confounding_strength * (pr_h - pr_a));
            const int ga = sample_group(rng, config.k, config.confounding_strength * (pr_a - pr_h));
            const auto& rh = raws[static_cast<std::size_t>(gh - 1)];
            const auto& ra = raws[static_cast<std::size_t>(ga - 1)];
            f.home.formation_raw = rh[std::uniform_int_distribution<std::size_t>(0, rh.size() - 1)(rng)];
            f.away.formation_raw = ra[std::uniform_int_distribution<std::size_t>(0, ra.size() - 1)(rng)];

            const double beta = config.true_beta(gh - 1, ga - 1);
            const double delta = latent[team_of.at(f.home.team)] - latent[team_of.at(f.away.team)];
            auto draw = [&](Target t) {
              const TargetEffect& e = effects[t];
              return e.beta_scale * beta + e.home_advantage + e.strength_effect * delta + e.noise_sd * std_normal(rng);
            };

            std::tie(f.home.stats.goals, f.away.stats.goals) = count_pair(rng, 1.1, std::lround(draw(Target::goals)));
            std::tie(f.home.stats.corners, f.away.stats.corners) =
                count_pair(rng, 4.0, std::lround(draw(Target::corners)));
            std::tie(f.home.stats.yellow_cards, f.away.stats.yellow_cards) =
                count_pair(rng, 1.6, std::lround(draw(Target::yellow_cards)));
            std::tie(f.home.stats.red_cards, f.away.stats.red_cards) =
                count_pair(rng, 0.05, std::lround(draw(Target::red_cards)));
            const double share = std::clamp<double>(static_cast<double>(std::lround(50.0 + draw(Target::possession) / 2.0)), 20.0, 80.0);
            f.home.stats.possession = share;
            f.away.stats.possession = 100.0 - share;

            if (config.weather) {
              const double temp = std::round(std::normal_distribution<double>(14.0, 7.0)(rng) * 10.0) / 10.0;
              const double hum = std::round((40.0 + 55.0 * unit(rng)) * 10.0) / 10.0;
              if (unit(rng) >= 0.03) f.temperature = temp;
              if (unit(rng) >= 0.03) f.humidity = hum;
            }
          }
          for (std::size_t i = begin; i < end; ++i) tracker.record(round[i]);
          begin = end;
        }
        for (auto& f : round) out.fixtures.push_back(std::move(f));
      }
    }
  }

  out.truth.true_beta = config.true_beta;
  out.truth.home_advantage = config.home_advantage;
  out.truth.effects = std::move(effects);
  return out;
}

void write_truth_file(const std::filesystem::path& path, const SynthTruth& truth) {
  std::string text = "# home_advantage=" + format_double(truth.home_advantage) + "\n";
  for (const auto& [t, e] : truth.effects)
    text += "# effect." + std::string(target_name(t)) + "=" + format_double(e.beta_scale) + "," +
            format_double(e.home_advantage) + "," + format_double(e.strength_effect) + "," +
            format_double(e.noise_sd) + "\n";
  text += grid_to_csv(truth.true_beta);
  write_text_file(path, text);
}

SynthTruth read_truth_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open truth file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  SynthTruth truth;
  truth.true_beta = parse_grid_csv(text);
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("# ", 0) != 0) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(line.substr(2, eq - 2));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "home_advantage") {
      auto v = parse_double(value);
      if (!v) throw Error(ErrorCode::schema, "truth file: bad home_advantage '" + value + "'");
      truth.home_advantage = *v;
    } else if (key.rfind("effect.", 0) == 0) {
      auto t = parse_target(key.substr(7));
      auto parts = split_record(value, ',');
      if (!t || parts.size() != 4) throw Error(ErrorCode::schema, "truth file: bad line '" + line + "'");
      double v[4];
      for (int i = 0; i < 4; ++i) {
        auto d = parse_double(parts[static_cast<std::size_t>(i)]);
        if (!d) throw Error(ErrorCode::schema, "truth file: bad number in '" + line + "'");
        v[i] = *d;
      }
      truth.effects[*t] = {v[0], v[1], v[2], v[3]};
    }
  }
  return truth;
}

}  // namespace fdml
