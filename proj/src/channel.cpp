#include <airsea/channel.hpp>

#include <cmath>
#include <numbers>

namespace airsea {

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

CVec steering(const Vec3& q, const Vec3& p, const SystemParams& sys) {
  const double dist = (q - p).norm();
  if (dist == 0.0) throw std::invalid_argument("steering: coincident points");
  const double cos_phi = sys.altitude / dist;
  const double k = 2.0 * std::numbers::pi * sys.antenna_spacing * cos_phi / sys.wavelength;
  CVec a(sys.num_antennas);
  for (int m = 0; m < sys.num_antennas; ++m) a[m] = std::polar(1.0, k * m);
  return a;
}

CommChannel comm_channel(const Vec3& q, const Vec2& b, const SystemParams& sys) {
  const Vec3 p = lift(b, 0.0);
  CommChannel ch;
  ch.distance = (q - p).norm();
  if (ch.distance == 0.0) throw std::invalid_argument("comm_channel: coincident points");
  ch.h = (sys.channel_gain * sys.small_scale_fading / (ch.distance * ch.distance)) * steering(q, p, sys);
  return ch;
}

SensingChannel sensing_channel(const Vec3& q, const Vec2& t, const SystemParams& sys) {
  const Vec3 p = lift(t, 0.0);
  SensingChannel ch;
  ch.distance = (q - p).norm();
  if (ch.distance == 0.0) throw std::invalid_argument("sensing_channel: coincident points");
  ch.a = steering(q, p, sys);
  ch.reflection = std::sqrt(sys.mean_rcs / (4.0 * std::numbers::pi * ch.distance * ch.distance));
  const double scale =
      sys.sensing_gain * ch.reflection / (2.0 * ch.distance * std::sqrt(double(sys.num_antennas)));
  ch.H = scale * ch.a * ch.a.adjoint();
  return ch;
}

CVec combiner(const Vec3& q, const Vec2& t, const SystemParams& sys) {
  CVec a = steering(q, lift(t, 0.0), sys);
  return a / a.norm();
}

double comm_snr(const CommChannel& ch, const CVec& w, const SystemParams& sys) {
  return sys.duty() * std::norm(ch.h.dot(w)) / sys.noise_comm;
}

double flying_rate(const Vec3& q, const Vec2& b, const CVec& w, const SystemParams& sys) {
  return std::log2(1.0 + comm_snr(comm_channel(q, b, sys), w, sys));
}

double hover_sinr(const Vec3& q, const Vec2& b, const CVec& w, const std::vector<CVec>& v,
                  const std::vector<bool>& active, const SystemParams& sys) {
  const CommChannel ch = comm_channel(q, b, sys);
  const double g = sys.duty();
  double interference = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (active[k]) interference += g * std::norm(ch.h.dot(v[k]));
  return g * std::norm(ch.h.dot(w)) / (interference + sys.noise_hover);
}

double hover_rate(const Vec3& q, const Vec2& b, const CVec& w, const std::vector<CVec>& v,
                  const std::vector<bool>& active, const SystemParams& sys) {
  return std::log2(1.0 + hover_sinr(q, b, w, v, active, sys));
}

double sensing_snr(const Vec3& q, const std::vector<Vec2>& targets, std::size_t k,
                   const std::vector<CVec>& v, const CVec& u, const std::vector<bool>& active,
                   const SystemParams& sys) {
  const double un = u.squaredNorm();
  if (un == 0.0) throw std::invalid_argument("sensing_snr: zero combiner");
  const SensingChannel ch = sensing_channel(q, targets[k], sys);
  const double g = sys.duty();
  const CVec uh = ch.H.adjoint() * u;  // u^H H x == uh^H x
  double interference = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j)
    if (j != k && active[j]) interference += g * std::norm(uh.dot(v[j]));
  return g * std::norm(uh.dot(v[k])) / (interference + sys.noise_sense * un);
}

double mrt_comm_snr(double d, double p, const SystemParams& sys) {
  const double rho = sys.channel_gain * sys.small_scale_fading;
  return sys.duty() * sys.num_antennas * p * rho * rho / (sys.noise_comm * std::pow(d, 4));
}

double mrt_sensing_snr(double d, double p, const SystemParams& sys) {
  return sys.duty() * sys.mean_rcs * sys.sensing_gain * sys.sensing_gain * p * sys.num_antennas /
         (16.0 * std::numbers::pi * sys.noise_sense * std::pow(d, 4));
}

double comm_distance_threshold(double rate, double p, const SystemParams& sys) {
  require_positive(rate, "rate");
  require_positive(p, "power");
  return std::pow(mrt_comm_snr(1.0, p, sys) / (std::exp2(rate) - 1.0), 0.25);
}

double sensing_distance_threshold(double snr, double p, const SystemParams& sys) {
  require_positive(snr, "snr");
  require_positive(p, "power");
  return std::pow(mrt_sensing_snr(1.0, p, sys) / snr, 0.25);
}

double comm_power_for_rate(double d, double rate, const SystemParams& sys) {
  return (std::exp2(rate) - 1.0) / mrt_comm_snr(d, 1.0, sys);
}

CVec mrt_beamformer(const Vec3& q, const Vec3& p, double power, const SystemParams& sys) {
  CVec a = steering(q, p, sys);
  return std::sqrt(std::max(power, 0.0)) * a / a.norm();
}

}  // namespace airsea
