#include "schatten/prox_oracle.hpp"

#include <cmath>
#include <random>

namespace schatten {

double prox_oracle(const ProxSpec& spec, double z, int grid) {
  const double r = 2.0 * std::abs(z);
  if (r == 0.0) return 0.0;
  auto f = [&](double x) { return prox_objective(spec, z, x); };

  const double h = 2.0 * r / grid;
  int best = 0;
  double fbest = f(-r);
  for (int i = 1; i <= grid; ++i) {
    const double v = f(-r + i * h);
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }

  // The objective is unimodal on each side of 0, so refine within the cell
  // pair around the best grid point, clipped so it does not straddle 0.
  double a = -r + (best - 1) * h;
  double b = -r + (best + 1) * h;
  const double xb = -r + best * h;
  if (xb > 0.0) a = std::max(a, 0.0);
  if (xb < 0.0) b = std::min(b, 0.0);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  double x = 0.5 * (a + b);
  if (f(xb) < f(x)) x = xb;
  return f(0.0) <= f(x) ? 0.0 : x;
}

ProxCheckReport prox_check(double p, int samples, int grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_tau(std::log(1e-2), std::log(2.0));
  std::uniform_real_distribution<double> zdist(-5.0, 5.0);
  ProxCheckReport rep;
  rep.samples = samples;
  for (int k = 0; k < samples; ++k) {
    const ProxSpec spec(p, std::exp(log_tau(rng)));
    const double z = zdist(rng);
    const double x = prox_scalar(spec, z);
    const double y = prox_oracle(spec, z, grid);
    const double dev = std::abs(x - y);
    rep.max_objective_gap =
        std::max(rep.max_objective_gap, prox_objective(spec, z, x) - prox_objective(spec, z, y));
    if (dev > rep.max_deviation) {
      rep.max_deviation = dev;
      rep.worst_tau = spec.tau;
      rep.worst_z = z;
    }
  }
  return rep;
}

}  // namespace schatten
