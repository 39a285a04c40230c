#pragma once

#include <cstdint>
#include <vector>

#include "wavicle/algebra.hpp"
#include "wavicle/model.hpp"
#include "wavicle/rng.hpp"

namespace wavicle {

// How a detector turns a wavicle into a number.
//   Eigenvalue:   every reading is one eigenvalue of the detector operator
//                 (importance-sampled for mixed wavicles; see MixedTermTable).
//   Expectation:  every reading is the phase-resolved expectation value, i.e.
//                 the noise-free limit of Eigenvalue mode.
// Both modes share all means; Eigenvalue mode only adds sampling variance.
enum class SamplingMode { Eigenvalue, Expectation };

// Exchange readings are produced one channel at a time while the ensemble
// identity pairs them: averaging cos(a + phi) * cos(b - phi) over the hidden
// phase leaves cos(a + b) / 2.  Scaling each exchange reading by sqrt(2)
// restores the lost factor of 2 in the product without touching the
// zero mean of either single-detector stream.
inline constexpr double kExchangeCalibration = 1.4142135623730951;

// Inverse-CDF sampler for readings of a pure wavicle: eigenvalue value_j with
// probability weight_j = |<f_j|state>|^2.
struct PureSampler {
  std::vector<double> weights;
  std::vector<double> values;
  double expectation = 0.0;  // sum of weight_j * value_j

  static PureSampler build(const StateVector& state, const SpectralDecomposition& decomp);
  double sample(double u01) const;
};

// Term table of a mixed (exchange) wavicle for one detector:
//   reading(phase) = sum_j magnitude_j * value_j * cos(alpha_j + phase)
// with magnitude_j = |conj(c_j(u)) * c_j(v)|, alpha_j its argument and
// value_j the eigenvalue.  bra_op_ket = <u|Op|v> caches the same data as a
// single complex number: reading(phase) = Re(exp(i*phase) * bra_op_ket).
struct MixedTermTable {
  std::vector<double> magnitude;
  std::vector<double> alpha;
  std::vector<double> value;
  double normalization = 0.0;  // sum of magnitude_j
  Complex bra_op_ket{0.0, 0.0};

  // One eigenvalue, drawn with probability magnitude_j / normalization and
  // weighted so the mean over draws and phase matches the expectation form.
  double eigenvalue_reading(double u01, double phase) const;
  // The deterministic phase-resolved value.
  double expectation_reading(double phase) const;
};

PureSampler build_pure_sampler(const StateVector& state, const SpectralDecomposition& decomp);
MixedTermTable build_mixed_table(const StateVector& u, const StateVector& v,
                                 const SpectralDecomposition& decomp);

// Stateful conveniences drawing from the stream's own counter.
double sample_pure_reading(RngStream& stream, const StateVector& state,
                           const SpectralDecomposition& decomp);
double sample_mixed_reading(RngStream& stream, const MixedTermTable& table, double phase,
                            SamplingMode mode);

// Everything one detector needs for all four channels.
struct DetectorTables {
  PureSampler pure_u;
  PureSampler pure_v;
  MixedTermTable mixed_uv;  // <u|Op|v> side
  MixedTermTable mixed_vu;  // <v|Op|u> side

  static DetectorTables build(const HermitianOperator& op, const StateVector& u,
                              const StateVector& v);
};

struct SamplingContext {
  SamplingMode mode = SamplingMode::Eigenvalue;
  // Calibration actually applied to exchange readings.  kExchangeCalibration
  // in production; scalable for self-test fault injection.
  double exchange_scale = kExchangeCalibration;
};

enum class DetectorId { A, B };

struct DetectorReading {
  DetectorId detector;
  ChannelKind channel;
  std::int64_t trial_id;
  double value;
};

struct EventReadings {
  DetectorReading a;
  DetectorReading b;
};

// Readings of both detectors for one event and one channel.  Draws are
// addressed by (trial, slot), so results are independent of the order in
// which channels, events, or workers are evaluated.  In the exchange
// channels detector A picks up the event phase with the sign from
// channel_phase and detector B with the opposite sign; both readings are
// scaled by ctx.exchange_scale.
EventReadings sample_event_readings(const RngStream& stream, const EmissionEvent& event,
                                    const Channel& channel, const DetectorTables& det_a,
                                    const DetectorTables& det_b, const SourceSpec& source_u,
                                    const SourceSpec& source_v, const SamplingContext& ctx);

}  // namespace wavicle
