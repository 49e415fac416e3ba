// Timing harness comparing the serial reference kernels against their
// OpenMP versions. The two paths write identical bits; this only reports
// speed.

#include <chrono>
#include <cstdio>
#include <random>

#include "hilbert/barycenter.hpp"
#include "hilbert/volume.hpp"

using namespace hilbert;

namespace {

template <typename F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main() {
  auto disc = EllipsoidDomain::unit_ball(2);
  auto t237 = triangle_group(2, 3, 7);

  // Density batch: per-point sphere quadrature.
  std::vector<CVec> pts;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(-0.95, 0.95);
  while (pts.size() < 96) {
    CVec c(2);
    c << unif(rng), unif(rng);
    if (c.squaredNorm() < 0.9) pts.push_back(c);
  }
  std::vector<double> serial_vals, parallel_vals;
  const double t_serial = timed([&] { serial_vals = density_batch(*disc, pts, 1 << 12, false); });
  const double t_parallel = timed([&] { parallel_vals = density_batch(*disc, pts, 1 << 12, true); });
  bool bitwise = true;
  for (size_t i = 0; i < pts.size(); ++i) bitwise = bitwise && serial_vals[i] == parallel_vals[i];
  std::printf("density_batch      serial %7.3fs  parallel %7.3fs  speedup %5.2fx  bitwise=%s\n",
              t_serial, t_parallel, t_serial / t_parallel, bitwise ? "yes" : "NO");

  // Ball volume: stratified radial Monte-Carlo.
  BallVolumeOptions opt;
  opt.density_nodes = 1 << 11;
  BallVolumeOptions opt_serial = opt;
  opt_serial.parallel = false;
  MonteCarloValue vs, vp;
  const double bv_serial =
      timed([&] { vs = ball_volume(*disc, disc->basepoint(), 4.0, 7, opt_serial); });
  const double bv_parallel = timed([&] { vp = ball_volume(*disc, disc->basepoint(), 4.0, 7, opt); });
  std::printf("ball_volume(R=4)   serial %7.3fs  parallel %7.3fs  speedup %5.2fx  bitwise=%s\n",
              bv_serial, bv_parallel, bv_serial / bv_parallel,
              vs.value == vp.value && vs.std_error == vp.std_error ? "yes" : "NO");

  // Orbit enumeration.
  OrbitOptions orb_serial;
  orb_serial.parallel = false;
  OrbitOptions orb_parallel;
  OrbitBall bs, bp;
  const double ob_serial =
      timed([&] { bs = orbit_ball(*disc, t237.group, t237.incenter, 7.0, orb_serial); });
  const double ob_parallel =
      timed([&] { bp = orbit_ball(*disc, t237.group, t237.incenter, 7.0, orb_parallel); });
  bool same = bs.size() == bp.size();
  for (size_t i = 0; same && i < bs.size(); i += 37) {
    same = bs.entries[i].distance == bp.entries[i].distance &&
           bs.entries[i].point == bp.entries[i].point;
  }
  std::printf("orbit_ball(R=7)    serial %7.3fs  parallel %7.3fs  speedup %5.2fx  bitwise=%s\n",
              ob_serial, ob_parallel, ob_serial / ob_parallel, same ? "yes" : "NO");
  return 0;
}
