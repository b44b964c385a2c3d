#include "spreadkit/black76.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spreadkit {

namespace {

double d2_of(const BlackParams& p) {
  const double s = std::sqrt(p.variance);
  return (std::log(p.forward / p.strike) - 0.5 * p.variance) / s;
}

void require_smooth(const BlackParams& p, const char* what) {
  if (!(p.strike > 0.0) || !(p.variance > 0.0))
    throw DomainError(std::string(what) + " requires a positive strike and a positive variance");
}

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * (0.5 * std::numbers::sqrt2)); }

double black(const BlackParams& p) {
  const double e = eta(p.direction);
  if (p.strike <= 0.0) return p.direction == Direction::Call ? p.discount * (p.forward - p.strike) : 0.0;
  if (p.variance <= 0.0) return p.discount * std::max(e * (p.forward - p.strike), 0.0);
  const double s = std::sqrt(p.variance);
  const double d1 = (std::log(p.forward / p.strike) + 0.5 * p.variance) / s;
  const double d2 = d1 - s;
  return e * p.discount * (p.forward * normal_cdf(e * d1) - p.strike * normal_cdf(e * d2));
}

double black_dk(const BlackParams& p) {
  const double e = eta(p.direction);
  if (p.strike <= 0.0) return p.direction == Direction::Call ? -p.discount : 0.0;
  if (p.variance <= 0.0) return e * (p.forward - p.strike) > 0.0 ? -e * p.discount : 0.0;
  return -e * p.discount * normal_cdf(e * d2_of(p));
}

double black_d2k(const BlackParams& p) {
  require_smooth(p, "black_d2k");
  const double s = std::sqrt(p.variance);
  return p.discount * normal_pdf(d2_of(p)) / (p.strike * s);
}

double black_d3k(const BlackParams& p) {
  require_smooth(p, "black_d3k");
  const double s = std::sqrt(p.variance);
  const double d2 = d2_of(p);
  return p.discount * normal_pdf(d2) / (p.strike * p.strike * s) * (d2 / s - 1.0);
}

}  // namespace spreadkit
