#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "wavicle/algebra.hpp"
#include "wavicle/rng.hpp"

namespace wavicle {

// Exchange symmetry of the emitted pairs.  sign() is the weight carried by
// the exchange channels: +1 for bosons, -1 for fermions.
enum class ParticleKind { Boson, Fermion };

struct Statistics {
  ParticleKind kind;
  double sign() const { return kind == ParticleKind::Boson ? 1.0 : -1.0; }
  static Statistics boson() { return {ParticleKind::Boson}; }
  static Statistics fermion() { return {ParticleKind::Fermion}; }
  bool operator==(const Statistics&) const = default;
};

// One emitting mode: its internal state, mean occupancy F >= 0, and carrier
// frequency used for the slow beat between two sources.
struct SourceSpec {
  std::string label;
  StateVector state = StateVector({Complex(1.0, 0.0)});  // scalar mode
  double occupancy = 1.0;
  double omega = 0.0;
};

// A single emission trial.  Each source starts its wave train at an
// unobservable phase, drawn uniformly on [0, 2*pi) and never reported to the
// detectors; only phase differences survive averaging.
struct EmissionEvent {
  double phase_u;
  double phase_v;
  double time;
  std::int64_t trial_id;
};

// Pairings of the bra and ket factors across the two sources.  Diag channels
// take both factors from one source per detector; Exch channels swap bra and
// ket between the sources and are the only carriers of the hidden phase.
enum class ChannelKind { DiagUV, DiagVU, ExchUV, ExchVU };

struct Channel {
  ChannelKind kind;
  double weight;
};

inline bool is_exchange(ChannelKind k) {
  return k == ChannelKind::ExchUV || k == ChannelKind::ExchVU;
}

// Slot layout of the counter-based RNG: every trial owns a fixed window of
// kDrawsPerTrial counters, one slot per possible draw, so readings do not
// depend on which channels or sampling modes actually consume randomness.
namespace slots {
inline constexpr std::uint64_t kDrawsPerTrial = 16;
enum : std::uint64_t {
  kPhaseU = 0,
  kPhaseV = 1,
  kPureAU = 2,
  kPureAV = 3,
  kPureBU = 4,
  kPureBV = 5,
  kMixedAUV = 6,
  kMixedAVU = 7,
  kMixedBUV = 8,
  kMixedBVU = 9,
};
}  // namespace slots

// Draw the hidden phases for one trial.  Pure in the stream: the variates are
// addressed by trial_id, so the same (seed, stream, trial) always yields the
// same event regardless of evaluation order across workers.
EmissionEvent draw_event(const RngStream& stream, const SourceSpec& source_u,
                         const SourceSpec& source_v, double time, std::int64_t trial_id);

// Phase entering the exchange readings:
//   phi = (omega_u - omega_v) * time - (phase_u - phase_v),
// reduced to (-pi, pi].
double phase_difference(const EmissionEvent& event, const SourceSpec& source_u,
                        const SourceSpec& source_v);

// The four bra/ket pairings with their ensemble weights: F_u*F_v on the diag
// channels, sign(stats)*F_u*F_v on the exchange channels.
std::array<Channel, 4> enumerate_channels(const SourceSpec& source_u,
                                          const SourceSpec& source_v, Statistics stats);

// Sign with which a channel picks up the event phase: +phi for ExchUV,
// -phi for ExchVU, 0 on the diag channels.
double channel_phase(ChannelKind kind, double phi);

}  // namespace wavicle
