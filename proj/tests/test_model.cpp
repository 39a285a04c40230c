#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "testutil.hpp"
#include "wavicle/model.hpp"
#include "wavicle/rng.hpp"
#include "wavicle/stats.hpp"

using namespace wavicle;
using testutil::kPi;

namespace {

SourceSpec scalar_source(const char* label, double occupancy, double omega = 0.0) {
  SourceSpec s;
  s.label = label;
  s.occupancy = occupancy;
  s.omega = omega;
  return s;
}

}  // namespace

TEST_CASE("Statistics carries the exchange sign") {
  CHECK(Statistics::boson().sign() == 1.0);
  CHECK(Statistics::fermion().sign() == -1.0);
  CHECK(is_exchange(ChannelKind::ExchUV));
  CHECK(is_exchange(ChannelKind::ExchVU));
  CHECK_FALSE(is_exchange(ChannelKind::DiagUV));
  CHECK_FALSE(is_exchange(ChannelKind::DiagVU));
}

TEST_CASE("draw_event is a pure function of (seed, stream, trial)") {
  const SourceSpec u = scalar_source("u", 1.0), v = scalar_source("v", 1.0);
  const RngStream stream(99, 3);

  const EmissionEvent e1 = draw_event(stream, u, v, 2.5, 7);
  const EmissionEvent e2 = draw_event(stream, u, v, 2.5, 7);
  CHECK(e1.phase_u == e2.phase_u);
  CHECK(e1.phase_v == e2.phase_v);
  CHECK(e1.time == 2.5);
  CHECK(e1.trial_id == 7);

  SUBCASE("evaluation order does not matter") {
    const EmissionEvent later = draw_event(stream, u, v, 1.0, 50);
    draw_event(stream, u, v, 1.0, 10);
    const EmissionEvent again = draw_event(stream, u, v, 1.0, 50);
    CHECK(later.phase_u == again.phase_u);
    CHECK(later.phase_v == again.phase_v);
  }
  SUBCASE("different trials and different streams decorrelate") {
    const EmissionEvent other = draw_event(stream, u, v, 2.5, 8);
    CHECK(e1.phase_u != other.phase_u);
    const RngStream stream2(99, 4);
    const EmissionEvent cross = draw_event(stream2, u, v, 2.5, 7);
    CHECK(e1.phase_u != cross.phase_u);
  }
}

TEST_CASE("drawn phases are uniform on [0, 2pi)") {
  const SourceSpec u = scalar_source("u", 1.0), v = scalar_source("v", 1.0);
  const RngStream stream(7, 0);
  const int n = 100000;
  std::vector<double> pu, pv;
  pu.reserve(n);
  pv.reserve(n);
  for (int t = 0; t < n; ++t) {
    const EmissionEvent e = draw_event(stream, u, v, 0.0, t);
    CHECK(e.phase_u >= 0.0);
    CHECK(e.phase_u < 2.0 * kPi);
    CHECK(e.phase_v >= 0.0);
    CHECK(e.phase_v < 2.0 * kPi);
    pu.push_back(e.phase_u / (2.0 * kPi));
    pv.push_back(e.phase_v / (2.0 * kPi));
  }
  const auto uniform_cdf = [](double x) { return x; };
  const double crit = ks_critical(n, 0.01);
  CHECK(ks_statistic(pu, uniform_cdf) < crit);
  CHECK(ks_statistic(pv, uniform_cdf) < crit);
}

TEST_CASE("phase_difference substitutions") {
  SourceSpec u = scalar_source("u", 1.0), v = scalar_source("v", 1.0);

  SUBCASE("identical sources give zero") {
    const EmissionEvent e{1.3, 1.3, 5.0, 0};
    CHECK(phase_difference(e, u, v) == 0.0);
  }
  SUBCASE("pure initial-phase difference, t = 0") {
    const EmissionEvent e{kPi / 2.0, 0.0, 0.0, 0};
    CHECK(phase_difference(e, u, v) == doctest::Approx(-kPi / 2.0));
  }
  SUBCASE("detuning term (omega_u - omega_v) * t") {
    u.omega = 0.3;
    const EmissionEvent e{0.8, 0.8, 2.0, 0};
    CHECK(phase_difference(e, u, v) == doctest::Approx(0.6).epsilon(1e-15));
  }
  SUBCASE("boundary value lands on +pi, not -pi") {
    u.omega = kPi;
    const EmissionEvent e{0.4, 0.4, 1.0, 0};
    CHECK(phase_difference(e, u, v) == kPi);
  }
  SUBCASE("range is (-pi, pi] across random events") {
    const RngStream stream(11, 1);
    u.omega = 2.7;
    v.omega = -0.4;
    for (int t = 0; t < 20000; ++t) {
      const EmissionEvent e = draw_event(stream, u, v, 0.37 * t, t);
      const double phi = phase_difference(e, u, v);
      CHECK(phi > -kPi);
      CHECK(phi <= kPi);
    }
  }
}

TEST_CASE("enumerate_channels weights") {
  SourceSpec u = scalar_source("u", 1.0), v = scalar_source("v", 1.0);

  SUBCASE("unit occupancies, boson: all +1") {
    const auto ch = enumerate_channels(u, v, Statistics::boson());
    REQUIRE(ch.size() == 4);
    for (const Channel& c : ch) CHECK(c.weight == 1.0);
  }
  SUBCASE("unit occupancies, fermion: diag +1, exchange -1") {
    const auto ch = enumerate_channels(u, v, Statistics::fermion());
    for (const Channel& c : ch)
      CHECK(c.weight == (is_exchange(c.kind) ? -1.0 : 1.0));
  }
  SUBCASE("weights scale as F_u * F_v") {
    u.occupancy = 2.0;
    v.occupancy = 0.5;
    const auto ch = enumerate_channels(u, v, Statistics::boson());
    for (const Channel& c : ch) CHECK(c.weight == doctest::Approx(1.0));
  }
  SUBCASE("dark source kills every channel") {
    u.occupancy = 0.0;
    const auto ch = enumerate_channels(u, v, Statistics::fermion());
    for (const Channel& c : ch) CHECK(c.weight == 0.0);
  }
  SUBCASE("u<->v relabeling with the paired channel swap is a symmetry") {
    u.occupancy = 1.7;
    v.occupancy = 0.3;
    const auto fwd = enumerate_channels(u, v, Statistics::fermion());
    const auto rev = enumerate_channels(v, u, Statistics::fermion());
    const auto weight_of = [](const std::array<Channel, 4>& ch, ChannelKind k) {
      for (const Channel& c : ch)
        if (c.kind == k) return c.weight;
      FAIL("channel kind missing");
      return 0.0;
    };
    CHECK(weight_of(fwd, ChannelKind::DiagUV) == weight_of(rev, ChannelKind::DiagVU));
    CHECK(weight_of(fwd, ChannelKind::DiagVU) == weight_of(rev, ChannelKind::DiagUV));
    CHECK(weight_of(fwd, ChannelKind::ExchUV) == weight_of(rev, ChannelKind::ExchVU));
    CHECK(weight_of(fwd, ChannelKind::ExchVU) == weight_of(rev, ChannelKind::ExchUV));
  }
  SUBCASE("statistics toggle flips exchange weights and nothing else") {
    u.occupancy = 1.7;
    v.occupancy = 0.3;
    const auto fer = enumerate_channels(u, v, Statistics::fermion());
    const auto bos = enumerate_channels(u, v, Statistics::boson());
    for (size_t i = 0; i < fer.size(); ++i) {
      REQUIRE(fer[i].kind == bos[i].kind);
      if (is_exchange(fer[i].kind))
        CHECK(fer[i].weight == -bos[i].weight);
      else
        CHECK(fer[i].weight == bos[i].weight);
    }
  }
}

TEST_CASE("channel_phase signs") {
  const double phi = 0.8315;
  CHECK(channel_phase(ChannelKind::ExchUV, phi) == phi);
  CHECK(channel_phase(ChannelKind::ExchVU, phi) == -phi);
  CHECK(channel_phase(ChannelKind::DiagUV, phi) == 0.0);
  CHECK(channel_phase(ChannelKind::DiagVU, phi) == 0.0);
  // Exact antisymmetry of the two exchange channels.
  CHECK(channel_phase(ChannelKind::ExchUV, phi) == -channel_phase(ChannelKind::ExchVU, phi));
}
