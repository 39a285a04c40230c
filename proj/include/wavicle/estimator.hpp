#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>

#include "wavicle/model.hpp"
#include "wavicle/sampler.hpp"

namespace wavicle {

struct Estimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
};

struct CorrelationEstimate {
  Estimate mean_a;
  Estimate mean_b;
  Estimate mean_ab;            // joint product, all channels
  Estimate uncorrelated_part;  // diag channels only
  Estimate correlated_part;    // exchange channels only
  std::int64_t trials = 0;
};

// Neumaier-compensated accumulation of a scalar and its square.
class CompensatedMoments {
 public:
  void add(double x);
  void merge(const CompensatedMoments& other);
  double sum() const;
  double sum_sq() const;

 private:
  double s_ = 0.0, sc_ = 0.0;    // value sum and compensation
  double q_ = 0.0, qc_ = 0.0;    // square sum and compensation
};

// Streaming estimator over emission trials.
//
// Readings arrive one channel at a time but belong to a trial; the
// accumulator buffers all channel contributions of the current trial and
// commits them as one sample when the trial id changes (or on evaluation).
// That grouping is what makes the error bars honest: within one event the
// two exchange channels share the hidden phase and are strongly correlated,
// so per-channel counting would understate the variance of the sums.
//
// Per trial the committed statistics are
//   a_i = sum_c  wa_c * a_c      separate detector-A sample
//   b_i = sum_c  wb_c * b_c      separate detector-B sample
//   u_i = sum_{c in diag} w_c * a_c * b_c
//   x_i = sum_{c in exch} w_c * a_c * b_c
//   j_i = u_i + x_i
// with joint weight w_c the channel weight handed to accumulate() and
// separate weights wa, wb = (F_u, F_v) on DiagUV, (F_v, F_u) on DiagVU and
// sqrt(F_u * F_v) on both exchange channels, so that the separate means
// estimate the two-source single-detector values and the joint means the
// channel-summed product values.
class Accumulator {
 public:
  Accumulator(std::string scenario, double occupancy_u, double occupancy_v);

  const std::string& scenario() const { return scenario_; }
  std::int64_t trials() const;

  // Feed one channel's pair of readings.  Both readings must carry the same
  // trial and channel, detector A first.  Trials must arrive contiguously.
  void accumulate(const DetectorReading& a, const DetectorReading& b, double weight);

  // Estimates.  Evaluation commits the pending trial; at least 2 trials are
  // required for an error bar.
  std::pair<Estimate, Estimate> separate_average();
  CorrelationEstimate joint_average();

  // Raw per-channel reading statistics (unweighted values as sampled),
  // for diagnostics such as exchange-noise variance.
  struct ChannelStats {
    std::int64_t count = 0;
    double sum_a = 0.0, sum_sq_a = 0.0;
    double sum_b = 0.0, sum_sq_b = 0.0;
    double sum_ab = 0.0;
  };
  ChannelStats channel_stats(ChannelKind kind) const;

  // Combine two partial accumulators over disjoint trial ranges of the same
  // scenario.  Either side may be empty.
  static Accumulator merged(Accumulator left, Accumulator right);

 private:
  void commit_pending();
  void add_reading(const DetectorReading& a, const DetectorReading& b, double weight);

  std::string scenario_;
  double occupancy_u_ = 1.0;
  double occupancy_v_ = 1.0;

  bool has_pending_ = false;
  std::int64_t pending_trial_ = -1;
  std::int64_t last_committed_ = -1;
  double pa_ = 0.0, pb_ = 0.0, pu_ = 0.0, px_ = 0.0;

  std::int64_t n_ = 0;
  CompensatedMoments ma_, mb_, mu_, mx_, mj_;
  std::array<ChannelStats, 4> channels_{};
};

}  // namespace wavicle
