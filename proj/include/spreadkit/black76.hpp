#pragma once

#include "spreadkit/market_model.hpp"

#include <stdexcept>

namespace spreadkit {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct BlackParams {
  double forward = 1.0;
  double strike = 1.0;
  double variance = 0.0;  // total variance to maturity
  double maturity = 1.0;
  Direction direction = Direction::Call;
  double discount = 1.0;
};

double normal_pdf(double x);
/// Via erfc, accurate in both tails.
double normal_cdf(double x);

/// Black-76 price. Limits: zero variance gives the discounted intrinsic
/// value; a non-positive strike gives B(F - K) for a call and 0 for a put.
double black(const BlackParams& p);

/// dBlack/dK, defined everywhere (step function at zero variance).
double black_dk(const BlackParams& p);
/// d2Black/dK2; requires K > 0 and v > 0.
double black_d2k(const BlackParams& p);
/// d3Black/dK3 = B phi(d2) / (K^2 sqrt v) * (d2 / sqrt v - 1); requires K > 0 and v > 0.
double black_d3k(const BlackParams& p);

}  // namespace spreadkit
