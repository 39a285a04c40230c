#include "wavicle/estimator.hpp"

#include <cmath>
#include <stdexcept>

namespace wavicle {

namespace {

void neumaier_add(double& s, double& c, double x) {
  const double t = s + x;
  if (std::abs(s) >= std::abs(x))
    c += (s - t) + x;
  else
    c += (x - t) + s;
  s = t;
}

Estimate make_estimate(double sum, double sum_sq, std::int64_t n) {
  Estimate e;
  e.mean = sum / static_cast<double>(n);
  const double var =
      std::max(0.0, (sum_sq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1));
  e.stderr_mean = std::sqrt(var / static_cast<double>(n));
  return e;
}

}  // namespace

void CompensatedMoments::add(double x) {
  neumaier_add(s_, sc_, x);
  neumaier_add(q_, qc_, x * x);
}

void CompensatedMoments::merge(const CompensatedMoments& other) {
  neumaier_add(s_, sc_, other.s_);
  neumaier_add(s_, sc_, other.sc_);
  neumaier_add(q_, qc_, other.q_);
  neumaier_add(q_, qc_, other.qc_);
}

double CompensatedMoments::sum() const { return s_ + sc_; }
double CompensatedMoments::sum_sq() const { return q_ + qc_; }

Accumulator::Accumulator(std::string scenario, double occupancy_u, double occupancy_v)
    : scenario_(std::move(scenario)), occupancy_u_(occupancy_u), occupancy_v_(occupancy_v) {
  if (!(occupancy_u_ >= 0.0) || !(occupancy_v_ >= 0.0))
    throw std::invalid_argument("Accumulator: occupancies must be >= 0");
}

std::int64_t Accumulator::trials() const { return n_ + (has_pending_ ? 1 : 0); }

void Accumulator::accumulate(const DetectorReading& a, const DetectorReading& b, double weight) {
  if (a.detector != DetectorId::A || b.detector != DetectorId::B)
    throw std::invalid_argument("accumulate: readings must be (detector A, detector B)");
  if (a.channel != b.channel)
    throw std::invalid_argument("accumulate: readings from different channels");
  if (a.trial_id != b.trial_id)
    throw std::invalid_argument("accumulate: readings from different trials");
  if (!std::isfinite(weight) || !std::isfinite(a.value) || !std::isfinite(b.value))
    throw std::invalid_argument("accumulate: non-finite input");

  if (has_pending_ && a.trial_id != pending_trial_) commit_pending();
  if (!has_pending_) {
    if (a.trial_id <= last_committed_)
      throw std::logic_error("accumulate: trial arrived after a later trial was committed");
    has_pending_ = true;
    pending_trial_ = a.trial_id;
  }
  add_reading(a, b, weight);
}

void Accumulator::add_reading(const DetectorReading& a, const DetectorReading& b, double weight) {
  double wa = 0.0, wb = 0.0;
  switch (a.channel) {
    case ChannelKind::DiagUV:
      wa = occupancy_u_;
      wb = occupancy_v_;
      break;
    case ChannelKind::DiagVU:
      wa = occupancy_v_;
      wb = occupancy_u_;
      break;
    case ChannelKind::ExchUV:
    case ChannelKind::ExchVU:
      wa = wb = std::sqrt(occupancy_u_ * occupancy_v_);
      break;
  }
  pa_ += wa * a.value;
  pb_ += wb * b.value;
  const double prod = weight * (a.value * b.value);
  if (is_exchange(a.channel))
    px_ += prod;
  else
    pu_ += prod;

  ChannelStats& ch = channels_[static_cast<size_t>(a.channel)];
  ch.count += 1;
  ch.sum_a += a.value;
  ch.sum_sq_a += a.value * a.value;
  ch.sum_b += b.value;
  ch.sum_sq_b += b.value * b.value;
  ch.sum_ab += a.value * b.value;
}

void Accumulator::commit_pending() {
  if (!has_pending_) return;
  ma_.add(pa_);
  mb_.add(pb_);
  mu_.add(pu_);
  mx_.add(px_);
  mj_.add(pu_ + px_);
  n_ += 1;
  last_committed_ = pending_trial_;
  has_pending_ = false;
  pa_ = pb_ = pu_ = px_ = 0.0;
}

std::pair<Estimate, Estimate> Accumulator::separate_average() {
  commit_pending();
  if (n_ < 2) throw std::runtime_error("separate_average: need at least 2 trials");
  return {make_estimate(ma_.sum(), ma_.sum_sq(), n_), make_estimate(mb_.sum(), mb_.sum_sq(), n_)};
}

CorrelationEstimate Accumulator::joint_average() {
  commit_pending();
  if (n_ < 2) throw std::runtime_error("joint_average: need at least 2 trials");
  CorrelationEstimate est;
  est.mean_a = make_estimate(ma_.sum(), ma_.sum_sq(), n_);
  est.mean_b = make_estimate(mb_.sum(), mb_.sum_sq(), n_);
  est.mean_ab = make_estimate(mj_.sum(), mj_.sum_sq(), n_);
  est.uncorrelated_part = make_estimate(mu_.sum(), mu_.sum_sq(), n_);
  est.correlated_part = make_estimate(mx_.sum(), mx_.sum_sq(), n_);
  est.trials = n_;
  return est;
}

Accumulator::ChannelStats Accumulator::channel_stats(ChannelKind kind) const {
  return channels_[static_cast<size_t>(kind)];
}

Accumulator Accumulator::merged(Accumulator left, Accumulator right) {
  left.commit_pending();
  right.commit_pending();
  if (left.scenario_ != right.scenario_)
    throw std::invalid_argument("merged: accumulators belong to different scenarios");
  if (left.occupancy_u_ != right.occupancy_u_ || left.occupancy_v_ != right.occupancy_v_)
    throw std::invalid_argument("merged: accumulators disagree on occupancies");
  left.n_ += right.n_;
  left.ma_.merge(right.ma_);
  left.mb_.merge(right.mb_);
  left.mu_.merge(right.mu_);
  left.mx_.merge(right.mx_);
  left.mj_.merge(right.mj_);
  for (size_t k = 0; k < left.channels_.size(); ++k) {
    ChannelStats& l = left.channels_[k];
    const ChannelStats& r = right.channels_[k];
    l.count += r.count;
    l.sum_a += r.sum_a;
    l.sum_sq_a += r.sum_sq_a;
    l.sum_b += r.sum_b;
    l.sum_sq_b += r.sum_sq_b;
    l.sum_ab += r.sum_ab;
  }
  left.last_committed_ = std::max(left.last_committed_, right.last_committed_);
  return left;
}

}  // namespace wavicle
