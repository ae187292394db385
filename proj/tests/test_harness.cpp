#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "risbeam/harness.hpp"

using namespace risbeam;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("scheme names round trip") {
  for (Scheme s : {Scheme::proposed_p1, Scheme::proposed_p2, Scheme::no_ris,
                   Scheme::manual_comm, Scheme::manual_radar, Scheme::manual_both,
                   Scheme::sensing_only})
    CHECK(scheme_from_name(scheme_name(s)) == s);
  CHECK_FALSE(scheme_from_name("nope").has_value());
}

TEST_CASE("apply_parameter") {
  ScenarioConfig base = ScenarioConfig::desk_default();
  ScenarioConfig g = apply_parameter(base, "Gamma_dB", 8.0);
  CHECK(g.gamma_req == doctest::Approx(from_db(8.0)).epsilon(1e-12));
  ScenarioConfig n = apply_parameter(base, "N", 25.0);
  CHECK(n.N == 25);
  CHECK_THROWS_AS(apply_parameter(base, "bogus", 1.0), std::invalid_argument);
}

TEST_CASE("single-cell sweep produces exactly one summary row") {
  SweepSpec spec;
  spec.base = ScenarioConfig::desk_default();
  spec.base.n_rand = 50;
  spec.base.finalize();
  spec.parameter = "Gamma_dB";
  spec.values = {5.0};
  spec.trials = 1;
  spec.schemes = {Scheme::no_ris};
  SweepResult r = run_sweep(spec);
  CHECK(r.summary.size() == 1);
  CHECK(r.rows.size() == 1);
  CHECK(r.summary[0].trials_ok == 1);
}

TEST_CASE("no-RIS fairness tracks the requirement across a Gamma sweep") {
  SweepSpec spec;
  spec.base = ScenarioConfig::desk_default();
  spec.parameter = "Gamma_dB";
  spec.values = {2.0, 5.0, 8.0};
  spec.trials = 2;
  spec.schemes = {Scheme::no_ris};
  SweepResult r = run_sweep(spec);
  for (double v : spec.values) {
    const SummaryRow* row = r.find(v, Scheme::no_ris);
    REQUIRE(row != nullptr);
    CHECK(row->mean_fairness == doctest::Approx(from_db(v)).epsilon(1e-3));
  }
}

TEST_CASE("sweep summaries equal recomputed means and files carry no NaN") {
  SweepSpec spec;
  spec.base = ScenarioConfig::desk_default();
  spec.base.n_rand = 50;
  spec.base.finalize();
  spec.parameter = "T_d";
  spec.values = {0.0, 2.0};
  spec.trials = 2;
  spec.schemes = {Scheme::no_ris, Scheme::proposed_p2};
  spec.workers = 2;
  SweepResult r = run_sweep(spec);

  for (const auto& s : r.summary) {
    double acc = 0;
    int count = 0;
    for (const auto& row : r.rows) {
      if (row.value != s.value || row.scheme != s.scheme || !row.ok) continue;
      acc += row.fairness;
      ++count;
    }
    REQUIRE(count == s.trials_ok);
    CHECK(acc / count == s.mean_fairness);  // bitwise: same order, same arithmetic
  }

  auto dir = std::filesystem::temp_directory_path() / "risbeam_sweep_test";
  write_sweep_csv(r, dir.string());
  std::string summary = slurp(dir / "summary.csv");
  std::string trials = slurp(dir / "trials.csv");
  for (const auto* text : {&summary, &trials}) {
    CHECK(text->find("nan") == std::string::npos);
    CHECK(text->find("inf") == std::string::npos);
  }

  // the written summary re-derives exactly from the written trial rows
  auto srows = parse_csv(summary);
  auto trows = parse_csv(trials);
  for (std::size_t i = 1; i < srows.size(); ++i) {
    const auto& s = srows[i];
    double value = std::strtod(s[1].c_str(), nullptr);
    const std::string& scheme = s[2];
    double acc = 0;
    int count = 0;
    for (std::size_t j = 1; j < trows.size(); ++j) {
      const auto& t = trows[j];
      if (std::strtod(t[1].c_str(), nullptr) != value || t[2] != scheme || t[5] != "1")
        continue;
      acc += std::strtod(t[7].c_str(), nullptr);
      ++count;
    }
    CHECK(count == std::atoi(s[3].c_str()));
    double mean = std::strtod(s[5].c_str(), nullptr);
    CHECK(acc / count == mean);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep merging is deterministic across worker counts") {
  SweepSpec spec;
  spec.base = ScenarioConfig::desk_default();
  spec.base.n_rand = 50;
  spec.base.finalize();
  spec.parameter = "Gamma_dB";
  spec.values = {2.0, 5.0};
  spec.trials = 2;
  spec.schemes = {Scheme::proposed_p1, Scheme::no_ris};

  spec.workers = 1;
  SweepResult a = run_sweep(spec);
  spec.workers = 2;
  SweepResult b = run_sweep(spec);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].fairness == b.rows[i].fairness);
    CHECK(a.rows[i].worst_q == b.rows[i].worst_q);
    CHECK(a.rows[i].termination == b.rows[i].termination);
  }
}

TEST_CASE("a fully failing cell aborts the sweep") {
  SweepSpec spec;
  spec.base = ScenarioConfig::desk_default();
  spec.base.K_d = 1;  // one user unreachable without a RIS
  spec.base.finalize();
  spec.parameter = "Gamma_dB";
  spec.values = {5.0};
  spec.trials = 2;
  spec.schemes = {Scheme::no_ris};
  CHECK_THROWS_AS(run_sweep(spec), SweepCellFailure);
}

TEST_CASE("pattern export") {
  ScenarioConfig cfg = ScenarioConfig::desk_default();
  cfg.K = 1;
  cfg.K_d = 1;
  cfg.finalize();
  Rng crng(3);
  ChannelSet ch = assemble_scenario(cfg, crng);
  RisProfile manual = manual_comm_profile(cfg, ch);
  RisProfile none_r = RisProfile::absent_profile(cfg.N, RisProfile::Role::radar);
  DesignOutcome out = fixed_phase_design(cfg, ch, manual, none_r, true);
  REQUIRE(out.feasible());

  auto dir = std::filesystem::temp_directory_path() / "risbeam_pattern_test";
  export_patterns(out, cfg, dir.string());

  auto total = parse_csv(slurp(dir / "pattern_total.csv"));
  auto radar = parse_csv(slurp(dir / "pattern_radar.csv"));
  auto comm0 = parse_csv(slurp(dir / "pattern_comm_0.csv"));
  CHECK(total.size() == cfg.grid_deg.size() + 1);  // header + one row per angle
  for (std::size_t i = 1; i < total.size(); ++i) {
    double j_total = std::strtod(total[i][1].c_str(), nullptr);
    double j_parts = std::strtod(radar[i][1].c_str(), nullptr) +
                     std::strtod(comm0[i][1].c_str(), nullptr);
    CHECK(std::abs(j_total - j_parts) <= 1e-9 * std::max(1.0, j_total));
  }

  // the manual profile for a single user reflects towards that user
  Eigen::Vector2d psi_user =
      ScenarioConfig::direction_cosines(cfg.comm_ris, ch.user_positions[0]);
  auto ris_map = parse_csv(slurp(dir / "pattern_ris_comm.csv"));
  double best = -1;
  Eigen::Vector2d best_psi{0, 0};
  for (std::size_t i = 1; i < ris_map.size(); ++i) {
    double v = std::strtod(ris_map[i][2].c_str(), nullptr);
    if (v > best) {
      best = v;
      best_psi = {std::strtod(ris_map[i][0].c_str(), nullptr),
                  std::strtod(ris_map[i][1].c_str(), nullptr)};
    }
  }
  // 41-point grid on [-1, 1]: one cell of resolution
  CHECK(std::abs(best_psi(0) - psi_user(0)) <= 0.05 + 1e-12);
  CHECK(std::abs(best_psi(1) - psi_user(1)) <= 0.05 + 1e-12);
  std::filesystem::remove_all(dir);
}
