#include "wavicle/model.hpp"

#include <cmath>
#include <stdexcept>

namespace wavicle {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

void check_sources(const SourceSpec& u, const SourceSpec& v) {
  if (u.state.dim() != v.state.dim())
    throw std::invalid_argument("sources must share one internal dimension");
  if (!(u.occupancy >= 0.0) || !(v.occupancy >= 0.0) ||
      !std::isfinite(u.occupancy) || !std::isfinite(v.occupancy))
    throw std::invalid_argument("source occupancy must be finite and >= 0");
}
}  // namespace

EmissionEvent draw_event(const RngStream& stream, const SourceSpec& source_u,
                         const SourceSpec& source_v, double time, std::int64_t trial_id) {
  check_sources(source_u, source_v);
  if (trial_id < 0) throw std::invalid_argument("trial_id must be >= 0");
  const std::uint64_t base = static_cast<std::uint64_t>(trial_id) * slots::kDrawsPerTrial;
  EmissionEvent ev;
  ev.phase_u = kTwoPi * stream.uniform_at(base + slots::kPhaseU);
  ev.phase_v = kTwoPi * stream.uniform_at(base + slots::kPhaseV);
  ev.time = time;
  ev.trial_id = trial_id;
  return ev;
}

double phase_difference(const EmissionEvent& event, const SourceSpec& source_u,
                        const SourceSpec& source_v) {
  const double raw =
      (source_u.omega - source_v.omega) * event.time - (event.phase_u - event.phase_v);
  double r = std::remainder(raw, kTwoPi);
  if (r <= -kPi) r += kTwoPi;  // remainder returns [-pi, pi]; fold the open edge
  return r;
}

std::array<Channel, 4> enumerate_channels(const SourceSpec& source_u,
                                          const SourceSpec& source_v, Statistics stats) {
  check_sources(source_u, source_v);
  const double w = source_u.occupancy * source_v.occupancy;
  const double x = stats.sign() * w;
  return {Channel{ChannelKind::DiagUV, w}, Channel{ChannelKind::DiagVU, w},
          Channel{ChannelKind::ExchUV, x}, Channel{ChannelKind::ExchVU, x}};
}

double channel_phase(ChannelKind kind, double phi) {
  switch (kind) {
    case ChannelKind::ExchUV:
      return phi;
    case ChannelKind::ExchVU:
      return -phi;
    default:
      return 0.0;
  }
}

}  // namespace wavicle
