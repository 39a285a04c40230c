#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "testutil.hpp"
#include "wavicle/experiments.hpp"

using namespace wavicle;
using testutil::kPi;

namespace {

ExperimentConfig base_config(ExperimentKind kind, std::int64_t trials) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.trials = trials;
  cfg.seed = 42;
  cfg.workers = 2;
  return cfg;
}

bool rows_identical(const std::vector<ResultRow>& x, const std::vector<ResultRow>& y) {
  if (x.size() != y.size()) return false;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i].scan != y[i].scan) return false;
    if (x[i].mc_mean_a != y[i].mc_mean_a || x[i].stderr_a != y[i].stderr_a) return false;
    if (x[i].mc_mean_b != y[i].mc_mean_b || x[i].stderr_b != y[i].stderr_b) return false;
    if (x[i].mc_mean_ab != y[i].mc_mean_ab || x[i].stderr_ab != y[i].stderr_ab) return false;
    if (x[i].mc_uncorr != y[i].mc_uncorr || x[i].mc_corr != y[i].mc_corr) return false;
    if (x[i].oracle_total != y[i].oracle_total || x[i].z_score != y[i].z_score) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("scan column names per experiment kind") {
  CHECK(scan_columns(ExperimentKind::Epr) ==
        std::vector<std::string>{"gamma", "theta_a", "phi_a", "theta_b", "phi_b"});
  CHECK(scan_columns(ExperimentKind::Hbt) == std::vector<std::string>{"pr_dot_r"});
  CHECK(scan_columns(ExperimentKind::SpinFlow).front() == "theta");
  CHECK(scan_columns(ExperimentKind::Noise).back() == "ks_critical");
  CHECK(std::string(to_string(ExperimentKind::SpinFlow)) == "spinflow");
}

TEST_CASE("epr scan matches the -2 cos(gamma) law at landmark angles") {
  ExperimentConfig cfg = base_config(ExperimentKind::Epr, 20000);
  cfg.epr_angles = {
      {kPi / 2.0, 0.0, kPi / 2.0, 0.0},         // gamma = 0
      {kPi / 2.0, 0.0, kPi / 2.0, kPi / 2.0},   // gamma = pi/2
      {kPi / 2.0, 0.0, kPi / 2.0, kPi},         // gamma = pi
  };
  const std::vector<ResultRow> rows = run_epr_scan(cfg);
  REQUIRE(rows.size() == 3);

  CHECK(rows[0].scan[0].second == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rows[0].oracle_total == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(rows[1].oracle_total == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rows[2].oracle_total == doctest::Approx(2.0).epsilon(1e-12));

  for (const ResultRow& row : rows) {
    CHECK(std::isfinite(row.z_score));
    CHECK(row.z_score < 5.0);
    // Separate means vanish for equal occupancies.
    CHECK(std::abs(row.mc_mean_a) < 4.0 * row.stderr_a);
    CHECK(std::abs(row.mc_mean_b) < 4.0 * row.stderr_b);
    // Bookkeeping identity between the parts and the total.
    CHECK(std::abs(row.mc_mean_ab - (row.mc_uncorr + row.mc_corr)) <=
          1e-9 * std::max(1.0, std::abs(row.mc_mean_ab)));
  }

  // At gamma = 0 the correlation lives entirely in the exchange channels.
  CHECK(std::abs(rows[0].mc_corr - rows[0].oracle_corr) < 4.0 * rows[0].stderr_corr);
  CHECK(rows[0].oracle_corr == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(std::abs(rows[0].oracle_uncorr) < 1e-12);
}

TEST_CASE("epr scan is deterministic and worker-count invariant") {
  ExperimentConfig cfg = base_config(ExperimentKind::Epr, 10000);
  cfg.epr_angles = {{kPi / 2.0, 0.0, kPi / 2.0, 1.0}, {kPi / 3.0, 0.2, 2.0, 1.3}};

  const std::vector<ResultRow> first = run_epr_scan(cfg);
  const std::vector<ResultRow> second = run_epr_scan(cfg);
  CHECK(rows_identical(first, second));

  ExperimentConfig solo = cfg;
  solo.workers = 1;
  ExperimentConfig wide = cfg;
  wide.workers = 8;
  const std::vector<ResultRow> ones = run_epr_scan(solo);
  const std::vector<ResultRow> eights = run_epr_scan(wide);
  REQUIRE(ones.size() == eights.size());
  for (size_t i = 0; i < ones.size(); ++i) {
    CHECK(std::abs(ones[i].mc_mean_ab - eights[i].mc_mean_ab) <=
          1e-9 * std::max(1.0, std::abs(ones[i].mc_mean_ab)));
    CHECK(std::abs(ones[i].mc_mean_a - eights[i].mc_mean_a) <=
          1e-9 * std::max(1.0, std::abs(ones[i].mc_mean_a)));
  }

  SUBCASE("a different seed moves the estimates") {
    ExperimentConfig other = cfg;
    other.seed = 43;
    CHECK_FALSE(rows_identical(first, run_epr_scan(other)));
  }
}

TEST_CASE("sampling modes agree in the mean") {
  ExperimentConfig eig = base_config(ExperimentKind::Epr, 20000);
  eig.epr_angles = {{kPi / 2.0, 0.0, kPi / 2.0, kPi / 3.0}};
  ExperimentConfig exp = eig;
  exp.mode = SamplingMode::Expectation;
  exp.seed = 271;  // independent runs, combined error bar

  const ResultRow re = run_epr_scan(eig)[0];
  const ResultRow rx = run_epr_scan(exp)[0];
  const double se = std::sqrt(re.stderr_ab * re.stderr_ab + rx.stderr_ab * rx.stderr_ab);
  CHECK(std::abs(re.mc_mean_ab - rx.mc_mean_ab) < 4.0 * se);
  // Expectation mode strips the eigenvalue sampling noise.
  CHECK(rx.stderr_ab < re.stderr_ab);
}

TEST_CASE("hbt scan reproduces bunching and antibunching") {
  ExperimentConfig cfg = base_config(ExperimentKind::Hbt, 20000);
  cfg.hbt_phases = {0.0, kPi / 2.0, kPi};

  SUBCASE("fermions avoid each other at zero separation") {
    const std::vector<ResultRow> rows = run_hbt_scan(cfg);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].oracle_total == 0.0);
    CHECK(std::abs(rows[0].mc_mean_ab) < 4.0 * rows[0].stderr_ab);
    CHECK(rows[1].oracle_total == doctest::Approx(2.0));
    CHECK(rows[2].oracle_total == doctest::Approx(4.0));
    for (const ResultRow& row : rows) CHECK(row.z_score < 5.0);
  }
  SUBCASE("bosons bunch to twice the background") {
    cfg.stats = Statistics::boson();
    const std::vector<ResultRow> rows = run_hbt_scan(cfg);
    CHECK(rows[0].oracle_total == doctest::Approx(4.0));
    CHECK(rows[0].oracle_uncorr == doctest::Approx(2.0));
    CHECK(std::abs(rows[0].mc_mean_ab - 4.0) < 4.0 * rows[0].stderr_ab);
    for (const ResultRow& row : rows) CHECK(row.z_score < 5.0);
  }
  SUBCASE("occupancies scale the whole curve") {
    cfg.stats = Statistics::boson();
    cfg.occupancy_u = 2.0;
    cfg.occupancy_v = 0.5;
    const std::vector<ResultRow> rows = run_hbt_scan(cfg);
    CHECK(rows[0].oracle_total == doctest::Approx(4.0));  // 4 * 2 * 0.5
    CHECK(rows[0].z_score < 5.0);
  }
  SUBCASE("coincident wavevectors are rejected") {
    cfg.p_prime = cfg.p;
    CHECK_THROWS_AS(run_hbt_scan(cfg), std::invalid_argument);
  }
}

TEST_CASE("spinflow reproduces the probability split and the flow mean") {
  ExperimentConfig cfg = base_config(ExperimentKind::SpinFlow, 20000);
  cfg.spinflow_thetas = {0.0, kPi / 3.0, kPi / 2.0};

  SUBCASE("pure up-source: P(+1) = cos^2(theta/2)") {
    cfg.occupancy_v = 0.0;
    const std::vector<ResultRow> rows = run_spinflow(cfg);
    REQUIRE(rows.size() == 3);
    const double targets[] = {1.0, 0.75, 0.5};
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto& scan = rows[i].scan;
      REQUIRE(scan[3].first == "freq_plus");
      REQUIRE(scan[4].first == "freq_plus_oracle");
      CHECK(scan[4].second == doctest::Approx(targets[i]).epsilon(1e-12));
      CHECK(scan[5].second < 4.0);  // freq_plus_z
      CHECK(scan[2].second < 4.0);  // mean_z against cos(theta) * (F_up - F_down)
    }
    // theta = 0 is exact: every reading is +1.
    CHECK(rows[0].scan[3].second == 1.0);
    CHECK(rows[0].scan[5].second == 0.0);
  }
  SUBCASE("balanced sources flow nothing at any angle") {
    const std::vector<ResultRow> rows = run_spinflow(cfg);
    for (const ResultRow& row : rows) {
      CHECK(row.scan[1].second == 0.0);  // mean_oracle
      CHECK(std::abs(row.mc_mean_a) < 4.0 * row.stderr_a + 1e-15);
    }
  }
}

TEST_CASE("noise analysis quantifies the exchange-channel noise") {
  ExperimentConfig cfg = base_config(ExperimentKind::Noise, 30000);
  const std::vector<ResultRow> rows = run_noise_analysis(cfg);
  REQUIRE(rows.size() == 1);
  const ResultRow& row = rows[0];

  const auto field = [&](const char* name) {
    for (const auto& kv : row.scan)
      if (kv.first == name) return kv.second;
    FAIL("missing scan field ", name);
    return 0.0;
  };

  // Per-detector variance against the closed form (theta = pi/2 gives 1/2).
  CHECK(field("var_oracle") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(field("var_a") == doctest::Approx(field("var_oracle")).epsilon(0.05));
  CHECK(field("var_b") == doctest::Approx(field("var_oracle")).epsilon(0.05));

  // The captured reading distribution obeys the arcsine law.
  CHECK(field("ks_a") < field("ks_critical"));
  CHECK(field("ks_b") < field("ks_critical"));

  // Separate means carry no signal; the joint product recovers the full
  // correlated part (-2 sin^2(pi/2) here), with nothing uncorrelated left.
  CHECK(std::abs(row.mc_mean_a) < 4.0 * row.stderr_a);
  CHECK(std::abs(row.mc_mean_b) < 4.0 * row.stderr_b);
  CHECK(row.oracle_uncorr == 0.0);
  CHECK(row.mc_uncorr == 0.0);
  CHECK(row.oracle_corr == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(std::abs(row.mc_mean_ab - row.oracle_total) < 4.0 * row.stderr_ab);

  SUBCASE("expectation mode sees the same variance law") {
    ExperimentConfig exp = cfg;
    exp.mode = SamplingMode::Expectation;
    const ResultRow r2 = run_noise_analysis(exp)[0];
    double v = 0.0, vo = 0.0;
    for (const auto& kv : r2.scan) {
      if (kv.first == "var_a") v = kv.second;
      if (kv.first == "var_oracle") vo = kv.second;
    }
    CHECK(vo == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(v == doctest::Approx(vo).epsilon(0.05));
  }
}

TEST_CASE("run_experiment dispatches on the config kind") {
  ExperimentConfig cfg = base_config(ExperimentKind::Epr, 100);
  cfg.epr_angles = {{kPi / 2.0, 0.0, kPi / 2.0, 0.0}};
  CHECK(run_experiment(cfg).size() == 1);

  cfg = base_config(ExperimentKind::Hbt, 100);
  cfg.hbt_phases = {0.0, 1.0};
  CHECK(run_experiment(cfg).size() == 2);

  cfg = base_config(ExperimentKind::SpinFlow, 100);
  cfg.spinflow_thetas = {0.5};
  CHECK(run_experiment(cfg).size() == 1);

  cfg = base_config(ExperimentKind::Noise, 100);
  CHECK(run_experiment(cfg).size() == 1);

  SUBCASE("empty grids produce empty tables") {
    ExperimentConfig none = base_config(ExperimentKind::Epr, 100);
    CHECK(run_epr_scan(none).empty());
  }
  SUBCASE("trials below one are rejected") {
    ExperimentConfig bad = base_config(ExperimentKind::Noise, 0);
    CHECK_THROWS_AS(run_noise_analysis(bad), std::invalid_argument);
  }
}

TEST_CASE("detuned sources carry the beat into the exchange phase but not the means") {
  // Nonzero omega difference rotates the hidden phase per trial; ensemble
  // means are phase-averaged, so the correlation target is unchanged.
  ExperimentConfig cfg = base_config(ExperimentKind::Epr, 20000);
  cfg.epr_angles = {{kPi / 2.0, 0.0, kPi / 2.0, 0.0}};
  cfg.omega_u = 0.7;
  cfg.omega_v = 0.1;
  cfg.time_step = 1.3;
  const ResultRow row = run_epr_scan(cfg)[0];
  CHECK(row.oracle_total == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(row.z_score < 5.0);
}
