#include "wavicle/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "wavicle/rng.hpp"
#include "wavicle/stats.hpp"

namespace wavicle {

namespace {

struct Engine {
  SourceSpec source_u;
  SourceSpec source_v;
  DetectorTables det_a;
  DetectorTables det_b;
  std::vector<Channel> channels;
  SamplingContext ctx;
  double time_step = 1.0;
  std::string scenario;
};

// Per-trial exchange readings in their noise-free (expectation, uncalibrated)
// form, kept for distribution tests.  Indexed by trial id, so parallel
// workers fill disjoint slots.
struct NoiseCapture {
  std::vector<double> a;
  std::vector<double> b;
};

void run_block(const Engine& e, const RngStream& stream, std::int64_t t0, std::int64_t t1,
               Accumulator& acc, NoiseCapture* capture) {
  for (std::int64_t t = t0; t < t1; ++t) {
    const EmissionEvent ev =
        draw_event(stream, e.source_u, e.source_v, static_cast<double>(t) * e.time_step, t);
    for (const Channel& ch : e.channels) {
      const EventReadings r =
          sample_event_readings(stream, ev, ch, e.det_a, e.det_b, e.source_u, e.source_v, e.ctx);
      acc.accumulate(r.a, r.b, ch.weight);
    }
    if (capture) {
      const double phi = phase_difference(ev, e.source_u, e.source_v);
      capture->a[static_cast<size_t>(t)] = e.det_a.mixed_uv.expectation_reading(phi);
      capture->b[static_cast<size_t>(t)] = e.det_b.mixed_vu.expectation_reading(-phi);
    }
  }
}

Accumulator run_scenario(const Engine& e, std::uint64_t seed, std::uint64_t stream_id,
                         std::int64_t trials, int workers, NoiseCapture* capture) {
  if (trials < 1) throw std::invalid_argument("run_scenario: trials must be >= 1");
  if (capture) {
    capture->a.assign(static_cast<size_t>(trials), 0.0);
    capture->b.assign(static_cast<size_t>(trials), 0.0);
  }
  const RngStream stream(seed, stream_id);
  const int w = static_cast<int>(
      std::min<std::int64_t>(std::max(workers, 1), trials));

  const double fu = e.source_u.occupancy;
  const double fv = e.source_v.occupancy;
  if (w == 1) {
    Accumulator acc(e.scenario, fu, fv);
    run_block(e, stream, 0, trials, acc, capture);
    return acc;
  }

  std::vector<Accumulator> parts;
  parts.reserve(static_cast<size_t>(w));
  for (int i = 0; i < w; ++i) parts.emplace_back(e.scenario, fu, fv);
  std::vector<std::int64_t> bounds(static_cast<size_t>(w) + 1);
  for (int i = 0; i <= w; ++i)
    bounds[static_cast<size_t>(i)] = trials * static_cast<std::int64_t>(i) / w;

  std::vector<std::exception_ptr> errors(static_cast<size_t>(w));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(w) - 1);
  for (int i = 1; i < w; ++i) {
    threads.emplace_back([&, i] {
      try {
        run_block(e, stream, bounds[static_cast<size_t>(i)], bounds[static_cast<size_t>(i) + 1],
                  parts[static_cast<size_t>(i)], capture);
      } catch (...) {
        errors[static_cast<size_t>(i)] = std::current_exception();
      }
    });
  }
  try {
    run_block(e, stream, bounds[0], bounds[1], parts[0], capture);
  } catch (...) {
    errors[0] = std::current_exception();
  }
  for (std::thread& t : threads) t.join();
  for (const std::exception_ptr& err : errors)
    if (err) std::rethrow_exception(err);

  // Merge in worker order: the reduction order is fixed by construction, not
  // by thread completion, so the result is independent of scheduling.
  Accumulator total = std::move(parts.front());
  for (size_t i = 1; i < parts.size(); ++i)
    total = Accumulator::merged(std::move(total), std::move(parts[i]));
  return total;
}

double safe_z(double diff, double se) {
  if (se > 0.0) return std::abs(diff) / se;
  return std::abs(diff) < 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
}

void fill_mc_block(ResultRow& row, const CorrelationEstimate& est) {
  row.mc_mean_a = est.mean_a.mean;
  row.stderr_a = est.mean_a.stderr_mean;
  row.mc_mean_b = est.mean_b.mean;
  row.stderr_b = est.mean_b.stderr_mean;
  row.mc_mean_ab = est.mean_ab.mean;
  row.stderr_ab = est.mean_ab.stderr_mean;
  row.mc_uncorr = est.uncorrelated_part.mean;
  row.mc_corr = est.correlated_part.mean;
  row.stderr_uncorr = est.uncorrelated_part.stderr_mean;
  row.stderr_corr = est.correlated_part.stderr_mean;
}

std::string scenario_tag(const ExperimentConfig& cfg, size_t point,
                         const std::string& detail) {
  std::ostringstream os;
  os.precision(17);
  os << to_string(cfg.kind) << '[' << point << "] " << detail
     << " stats=" << (cfg.stats.kind == ParticleKind::Boson ? "boson" : "fermion")
     << " mode=" << (cfg.mode == SamplingMode::Eigenvalue ? "eigenvalue" : "expectation")
     << " Fu=" << cfg.occupancy_u << " Fv=" << cfg.occupancy_v;
  return os.str();
}

Engine make_spin_engine(const ExperimentConfig& cfg, const Direction& dir_a,
                        const Direction& dir_b, const std::string& scenario) {
  oracle::SpinScenario spin{dir_a, dir_b, cfg.occupancy_u, cfg.occupancy_v};
  oracle::TwoSourceScenario scn = oracle::to_two_source(spin, cfg.stats);
  scn.source_u.omega = cfg.omega_u;
  scn.source_v.omega = cfg.omega_v;
  Engine e;
  e.det_a = DetectorTables::build(scn.op_a, scn.source_u.state, scn.source_v.state);
  e.det_b = DetectorTables::build(scn.op_b, scn.source_u.state, scn.source_v.state);
  e.source_u = std::move(scn.source_u);
  e.source_v = std::move(scn.source_v);
  const std::array<Channel, 4> ch = enumerate_channels(e.source_u, e.source_v, cfg.stats);
  e.channels.assign(ch.begin(), ch.end());
  e.ctx = SamplingContext{cfg.mode, cfg.exchange_scale};
  e.time_step = cfg.time_step;
  e.scenario = scenario;
  return e;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Epr:
      return "epr";
    case ExperimentKind::Hbt:
      return "hbt";
    case ExperimentKind::SpinFlow:
      return "spinflow";
    case ExperimentKind::Noise:
      return "noise";
  }
  return "unknown";
}

std::vector<std::string> scan_columns(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Epr:
      return {"gamma", "theta_a", "phi_a", "theta_b", "phi_b"};
    case ExperimentKind::Hbt:
      return {"pr_dot_r"};
    case ExperimentKind::SpinFlow:
      return {"theta", "mean_oracle", "mean_z", "freq_plus", "freq_plus_oracle", "freq_plus_z"};
    case ExperimentKind::Noise:
      return {"theta", "phi", "var_a", "var_b", "var_oracle", "ks_a", "ks_b", "ks_critical"};
  }
  return {};
}

std::vector<ResultRow> run_epr_scan(const ExperimentConfig& cfg) {
  std::vector<ResultRow> rows;
  rows.reserve(cfg.epr_angles.size());
  for (size_t k = 0; k < cfg.epr_angles.size(); ++k) {
    const std::array<double, 4>& ang = cfg.epr_angles[k];
    const Direction dir_a(ang[0], ang[1]);
    const Direction dir_b(ang[2], ang[3]);
    std::ostringstream detail;
    detail.precision(17);
    detail << "ta=" << dir_a.theta << " pa=" << dir_a.phi << " tb=" << dir_b.theta
           << " pb=" << dir_b.phi;
    const Engine e = make_spin_engine(cfg, dir_a, dir_b, scenario_tag(cfg, k, detail.str()));
    Accumulator acc = run_scenario(e, cfg.seed, k, cfg.trials, cfg.workers, nullptr);
    const CorrelationEstimate est = acc.joint_average();

    const oracle::SpinScenario spin{dir_a, dir_b, cfg.occupancy_u, cfg.occupancy_v};
    ResultRow row;
    row.scan = {{"gamma", oracle::spin_gamma(dir_a, dir_b)},
                {"theta_a", dir_a.theta},
                {"phi_a", dir_a.phi},
                {"theta_b", dir_b.theta},
                {"phi_b", dir_b.phi}};
    fill_mc_block(row, est);
    row.oracle_uncorr = oracle::spin_pair_uncorr(spin);
    row.oracle_corr = oracle::spin_pair_corr(spin, cfg.stats);
    row.oracle_total = row.oracle_uncorr + row.oracle_corr;
    row.z_score = safe_z(est.mean_ab.mean - row.oracle_total, est.mean_ab.stderr_mean);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> run_hbt_scan(const ExperimentConfig& cfg) {
  double delta2 = 0.0;
  std::array<double, 3> delta{};
  for (int i = 0; i < 3; ++i) {
    delta[static_cast<size_t>(i)] = cfg.p[static_cast<size_t>(i)] - cfg.p_prime[static_cast<size_t>(i)];
    delta2 += delta[static_cast<size_t>(i)] * delta[static_cast<size_t>(i)];
  }
  if (!(delta2 > 0.0) && !cfg.hbt_phases.empty())
    throw std::invalid_argument("run_hbt_scan: p and pprime must differ");

  std::vector<ResultRow> rows;
  rows.reserve(cfg.hbt_phases.size());
  for (size_t k = 0; k < cfg.hbt_phases.size(); ++k) {
    const double x = cfg.hbt_phases[k];
    // Two occupied plane-wave modes seen by counting detectors at separation
    // R; all mode structure enters through the exchange phases, so the
    // tables are built directly: unit pure response, single mixed term with
    // alpha = -(p - p') . R at detector A and 0 at detector B (placed at the
    // origin).
    const StateVector mode({Complex(1.0, 0.0)});
    Engine e;
    e.source_u = SourceSpec{"p", mode, cfg.occupancy_u, cfg.omega_u};
    e.source_v = SourceSpec{"pprime", mode, cfg.occupancy_v, cfg.omega_v};
    const PureSampler unit{{1.0}, {1.0}, 1.0};
    e.det_a = DetectorTables{unit, unit,
                             MixedTermTable{{1.0}, {-x}, {1.0}, 1.0, std::polar(1.0, -x)},
                             MixedTermTable{{1.0}, {x}, {1.0}, 1.0, std::polar(1.0, x)}};
    e.det_b = DetectorTables{unit, unit,
                             MixedTermTable{{1.0}, {0.0}, {1.0}, 1.0, Complex(1.0, 0.0)},
                             MixedTermTable{{1.0}, {0.0}, {1.0}, 1.0, Complex(1.0, 0.0)}};
    const std::array<Channel, 4> ch = enumerate_channels(e.source_u, e.source_v, cfg.stats);
    e.channels.assign(ch.begin(), ch.end());
    e.ctx = SamplingContext{cfg.mode, cfg.exchange_scale};
    e.time_step = cfg.time_step;
    std::ostringstream detail;
    detail.precision(17);
    detail << "x=" << x;
    e.scenario = scenario_tag(cfg, k, detail.str());

    Accumulator acc = run_scenario(e, cfg.seed, k, cfg.trials, cfg.workers, nullptr);
    const CorrelationEstimate est = acc.joint_average();

    std::array<double, 3> r{};
    for (int i = 0; i < 3; ++i) r[static_cast<size_t>(i)] = x * delta[static_cast<size_t>(i)] / delta2;
    ResultRow row;
    row.scan = {{"pr_dot_r", x}};
    fill_mc_block(row, est);
    row.oracle_uncorr = 2.0 * cfg.occupancy_u * cfg.occupancy_v;
    row.oracle_total =
        oracle::hbt_correlation(cfg.p, cfg.p_prime, r, cfg.occupancy_u, cfg.occupancy_v, cfg.stats);
    row.oracle_corr = row.oracle_total - row.oracle_uncorr;
    row.z_score = safe_z(est.mean_ab.mean - row.oracle_total, est.mean_ab.stderr_mean);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> run_spinflow(const ExperimentConfig& cfg) {
  std::vector<ResultRow> rows;
  rows.reserve(cfg.spinflow_thetas.size());
  for (size_t k = 0; k < cfg.spinflow_thetas.size(); ++k) {
    const Direction dir(cfg.spinflow_thetas[k], 0.0);
    std::ostringstream detail;
    detail.precision(17);
    detail << "theta=" << dir.theta;
    const Engine e = make_spin_engine(cfg, dir, dir, scenario_tag(cfg, k, detail.str()));
    Accumulator acc = run_scenario(e, cfg.seed, k, cfg.trials, cfg.workers, nullptr);
    const CorrelationEstimate est = acc.joint_average();

    // Frequency of +1 readings on the up-source stream at detector A.
    const Accumulator::ChannelStats up = acc.channel_stats(ChannelKind::DiagUV);
    const double n_up = static_cast<double>(up.count);
    const double freq_plus = 0.5 * (1.0 + up.sum_a / n_up);
    const double freq_oracle = oracle::spin_flip_probability(dir.theta);
    const double freq_se = std::sqrt(freq_oracle * (1.0 - freq_oracle) / n_up);
    const double mean_oracle = oracle::spin_flow_mean(dir.theta, cfg.occupancy_u, cfg.occupancy_v);

    const oracle::SpinScenario spin{dir, dir, cfg.occupancy_u, cfg.occupancy_v};
    ResultRow row;
    row.scan = {{"theta", dir.theta},
                {"mean_oracle", mean_oracle},
                {"mean_z", safe_z(est.mean_a.mean - mean_oracle, est.mean_a.stderr_mean)},
                {"freq_plus", freq_plus},
                {"freq_plus_oracle", freq_oracle},
                {"freq_plus_z", safe_z(freq_plus - freq_oracle, freq_se)}};
    fill_mc_block(row, est);
    row.oracle_uncorr = oracle::spin_pair_uncorr(spin);
    row.oracle_corr = oracle::spin_pair_corr(spin, cfg.stats);
    row.oracle_total = row.oracle_uncorr + row.oracle_corr;
    row.z_score = safe_z(est.mean_ab.mean - row.oracle_total, est.mean_ab.stderr_mean);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> run_noise_analysis(const ExperimentConfig& cfg) {
  const Direction dir(cfg.noise_theta, cfg.noise_phi);
  std::ostringstream detail;
  detail.precision(17);
  detail << "theta=" << dir.theta << " phi=" << dir.phi << " exchange-only";
  Engine e = make_spin_engine(cfg, dir, dir, scenario_tag(cfg, 0, detail.str()));
  // Only the exchange channels run: this experiment isolates the reading
  // noise that joint averaging turns into correlation.
  std::erase_if(e.channels, [](const Channel& c) { return !is_exchange(c.kind); });

  NoiseCapture capture;
  Accumulator acc = run_scenario(e, cfg.seed, 0, cfg.trials, cfg.workers, &capture);
  const CorrelationEstimate est = acc.joint_average();

  const auto variance_of = [&](const Accumulator::ChannelStats& s1,
                               const Accumulator::ChannelStats& s2, bool use_a) {
    const double n = static_cast<double>(s1.count + s2.count);
    const double sum = use_a ? s1.sum_a + s2.sum_a : s1.sum_b + s2.sum_b;
    const double sum_sq = use_a ? s1.sum_sq_a + s2.sum_sq_a : s1.sum_sq_b + s2.sum_sq_b;
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    // Report the precalibration reading variance.
    return var / (cfg.exchange_scale * cfg.exchange_scale);
  };
  const Accumulator::ChannelStats x1 = acc.channel_stats(ChannelKind::ExchUV);
  const Accumulator::ChannelStats x2 = acc.channel_stats(ChannelKind::ExchVU);
  const double var_a = variance_of(x1, x2, true);
  const double var_b = variance_of(x1, x2, false);

  const StateVector up = spin_up();
  const StateVector down = spin_down();
  const HermitianOperator op = spin_operator(dir);
  const double var_oracle = oracle::mixed_noise_variance(up, down, op, cfg.mode);

  const double amp_a = std::abs(e.det_a.mixed_uv.bra_op_ket);
  const double amp_b = std::abs(e.det_b.mixed_vu.bra_op_ket);
  const double ks_a =
      ks_statistic(capture.a, [&](double x) { return arcsine_cdf(x, amp_a); });
  const double ks_b =
      ks_statistic(capture.b, [&](double x) { return arcsine_cdf(x, amp_b); });

  ResultRow row;
  row.scan = {{"theta", dir.theta},
              {"phi", dir.phi},
              {"var_a", var_a},
              {"var_b", var_b},
              {"var_oracle", var_oracle},
              {"ks_a", ks_a},
              {"ks_b", ks_b},
              {"ks_critical", ks_critical(capture.a.size(), 0.01)}};
  fill_mc_block(row, est);
  const oracle::SpinScenario spin{dir, dir, cfg.occupancy_u, cfg.occupancy_v};
  row.oracle_uncorr = 0.0;  // diag channels excluded by construction
  row.oracle_corr = oracle::spin_pair_corr(spin, cfg.stats);
  row.oracle_total = row.oracle_corr;
  row.z_score = safe_z(est.mean_ab.mean - row.oracle_total, est.mean_ab.stderr_mean);
  return {row};
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::Epr:
      return run_epr_scan(cfg);
    case ExperimentKind::Hbt:
      return run_hbt_scan(cfg);
    case ExperimentKind::SpinFlow:
      return run_spinflow(cfg);
    case ExperimentKind::Noise:
      return run_noise_analysis(cfg);
  }
  throw std::logic_error("run_experiment: unknown kind");
}

}  // namespace wavicle
