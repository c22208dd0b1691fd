#pragma once

// Closed-form air-sea link and echo models. Everything here is a pure
// function of geometry, beams and SystemParams.

#include <airsea/geometry.hpp>
#include <airsea/scenario.hpp>

#include <stdexcept>
#include <vector>

namespace airsea {

struct CommChannel {
  CVec h;
  double distance = 0.0;
};

struct SensingChannel {
  CMat H;                 // rank one, proportional to a a^H
  CVec a;                 // steering towards the target
  double distance = 0.0;
  double reflection = 0.0;  // sqrt(eta / (4 pi d^2))
};

/// ULA response; entry m is exp(j 2 pi m d cos(phi) / lambda), cos(phi) = H / |q - p|.
CVec steering(const Vec3& q, const Vec3& p, const SystemParams& sys);

CommChannel comm_channel(const Vec3& q, const Vec2& b, const SystemParams& sys);
SensingChannel sensing_channel(const Vec3& q, const Vec2& t, const SystemParams& sys);

/// Unit-norm matched-filter combiner towards a target.
CVec combiner(const Vec3& q, const Vec2& t, const SystemParams& sys);

double comm_snr(const CommChannel& ch, const CVec& w, const SystemParams& sys);
double flying_rate(const Vec3& q, const Vec2& b, const CVec& w, const SystemParams& sys);

/// Hover-mode SINR at the USV; sensing beams of inactive targets are skipped.
double hover_sinr(const Vec3& q, const Vec2& b, const CVec& w, const std::vector<CVec>& v,
                  const std::vector<bool>& active, const SystemParams& sys);
double hover_rate(const Vec3& q, const Vec2& b, const CVec& w, const std::vector<CVec>& v,
                  const std::vector<bool>& active, const SystemParams& sys);

/// Echo SINR of target k; v and active are indexed like targets.
double sensing_snr(const Vec3& q, const std::vector<Vec2>& targets, std::size_t k,
                   const std::vector<CVec>& v, const CVec& u, const std::vector<bool>& active,
                   const SystemParams& sys);

/// SNR delivered by MRT with power p at distance d, no interference.
double mrt_comm_snr(double d, double p, const SystemParams& sys);
double mrt_sensing_snr(double d, double p, const SystemParams& sys);

double comm_distance_threshold(double rate, double p, const SystemParams& sys);
double sensing_distance_threshold(double snr, double p, const SystemParams& sys);

/// Minimum MRT power achieving `rate` at distance d.
double comm_power_for_rate(double d, double rate, const SystemParams& sys);

/// sqrt(power) * a / |a|.
CVec mrt_beamformer(const Vec3& q, const Vec3& p, double power, const SystemParams& sys);

}  // namespace airsea
