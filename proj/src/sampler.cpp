#include "wavicle/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace wavicle {

PureSampler PureSampler::build(const StateVector& state, const SpectralDecomposition& decomp) {
  const std::vector<Complex> c = overlap_coefficients(state, decomp);
  PureSampler s;
  s.weights.reserve(c.size());
  s.values = decomp.eigenvalues;
  double mean = 0.0;
  for (size_t j = 0; j < c.size(); ++j) {
    const double w = std::norm(c[j]);
    s.weights.push_back(w);
    mean += w * s.values[j];
  }
  s.expectation = mean;
  return s;
}

double PureSampler::sample(double u01) const {
  // Inverse CDF by prefix subtraction; the final bucket absorbs rounding.
  double r = u01;
  for (size_t j = 0; j + 1 < weights.size(); ++j) {
    r -= weights[j];
    if (r < 0.0) return values[j];
  }
  return values.back();
}

double MixedTermTable::eigenvalue_reading(double u01, double phase) const {
  if (!(normalization > 0.0)) return 0.0;
  double r = u01 * normalization;
  size_t j = magnitude.size() - 1;
  for (size_t k = 0; k + 1 < magnitude.size(); ++k) {
    r -= magnitude[k];
    if (r < 0.0) {
      j = k;
      break;
    }
  }
  return normalization * value[j] * std::cos(alpha[j] + phase);
}

double MixedTermTable::expectation_reading(double phase) const {
  if (!(normalization > 0.0)) return 0.0;
  return std::cos(phase) * bra_op_ket.real() - std::sin(phase) * bra_op_ket.imag();
}

PureSampler build_pure_sampler(const StateVector& state, const SpectralDecomposition& decomp) {
  return PureSampler::build(state, decomp);
}

MixedTermTable build_mixed_table(const StateVector& u, const StateVector& v,
                                 const SpectralDecomposition& decomp) {
  const std::vector<Complex> cu = overlap_coefficients(u, decomp);
  const std::vector<Complex> cv = overlap_coefficients(v, decomp);
  MixedTermTable t;
  const size_t n = cu.size();
  t.magnitude.reserve(n);
  t.alpha.reserve(n);
  t.value = decomp.eigenvalues;
  Complex acc(0.0, 0.0);
  for (size_t j = 0; j < n; ++j) {
    const Complex g = std::conj(cu[j]) * cv[j];
    const double m = std::abs(g);
    t.magnitude.push_back(m);
    t.alpha.push_back(m > 0.0 ? std::atan2(g.imag(), g.real()) : 0.0);
    t.normalization += m;
    acc += g * t.value[j];
  }
  t.bra_op_ket = acc;
  return t;
}

double sample_pure_reading(RngStream& stream, const StateVector& state,
                           const SpectralDecomposition& decomp) {
  return PureSampler::build(state, decomp).sample(stream.next_uniform());
}

double sample_mixed_reading(RngStream& stream, const MixedTermTable& table, double phase,
                            SamplingMode mode) {
  if (mode == SamplingMode::Eigenvalue)
    return table.eigenvalue_reading(stream.next_uniform(), phase);
  return table.expectation_reading(phase);
}

DetectorTables DetectorTables::build(const HermitianOperator& op, const StateVector& u,
                                     const StateVector& v) {
  const SpectralDecomposition decomp = spectral_decompose(op);
  DetectorTables t{PureSampler::build(u, decomp), PureSampler::build(v, decomp),
                   build_mixed_table(u, v, decomp), build_mixed_table(v, u, decomp)};
  return t;
}

namespace {

double mixed_at(const MixedTermTable& table, const RngStream& stream, std::uint64_t counter,
                double phase, const SamplingContext& ctx) {
  const double raw = ctx.mode == SamplingMode::Eigenvalue
                         ? table.eigenvalue_reading(stream.uniform_at(counter), phase)
                         : table.expectation_reading(phase);
  return ctx.exchange_scale * raw;
}

}  // namespace

EventReadings sample_event_readings(const RngStream& stream, const EmissionEvent& event,
                                    const Channel& channel, const DetectorTables& det_a,
                                    const DetectorTables& det_b, const SourceSpec& source_u,
                                    const SourceSpec& source_v, const SamplingContext& ctx) {
  if (event.trial_id < 0) throw std::invalid_argument("trial_id must be >= 0");
  const std::uint64_t base =
      static_cast<std::uint64_t>(event.trial_id) * slots::kDrawsPerTrial;
  double a = 0.0;
  double b = 0.0;
  switch (channel.kind) {
    case ChannelKind::DiagUV:
      a = det_a.pure_u.sample(stream.uniform_at(base + slots::kPureAU));
      b = det_b.pure_v.sample(stream.uniform_at(base + slots::kPureBV));
      break;
    case ChannelKind::DiagVU:
      a = det_a.pure_v.sample(stream.uniform_at(base + slots::kPureAV));
      b = det_b.pure_u.sample(stream.uniform_at(base + slots::kPureBU));
      break;
    case ChannelKind::ExchUV: {
      const double phi = channel_phase(channel.kind, phase_difference(event, source_u, source_v));
      a = mixed_at(det_a.mixed_uv, stream, base + slots::kMixedAUV, phi, ctx);
      b = mixed_at(det_b.mixed_vu, stream, base + slots::kMixedBVU, -phi, ctx);
      break;
    }
    case ChannelKind::ExchVU: {
      const double phi = channel_phase(channel.kind, phase_difference(event, source_u, source_v));
      a = mixed_at(det_a.mixed_vu, stream, base + slots::kMixedAVU, phi, ctx);
      b = mixed_at(det_b.mixed_uv, stream, base + slots::kMixedBUV, -phi, ctx);
      break;
    }
  }
  return EventReadings{DetectorReading{DetectorId::A, channel.kind, event.trial_id, a},
                       DetectorReading{DetectorId::B, channel.kind, event.trial_id, b}};
}

}  // namespace wavicle
