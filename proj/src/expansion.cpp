#include "spreadkit/expansion.hpp"

#include "spreadkit/black76.hpp"
#include "spreadkit/compensated_sum.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spreadkit {

namespace {

Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

// k-th strike derivative of Black(exp(log_forward), kappa*, nu^2, T).
double strike_derivative(const ExpansionInputs& in, int k, double log_forward) {
  const BlackParams p{std::exp(log_forward), in.kappa_star, in.nu2, in.maturity, in.direction, in.discount};
  switch (k) {
    case 0:
      return black(p);
    case 1:
      return black_dk(p);
    case 2:
      return black_d2k(p);
    case 3:
      return black_d3k(p);
    default:
      throw std::invalid_argument("strike derivative order must be 0..3");
  }
}

double term(const ExpansionInputs& in, int k, const Moment& m) {
  return std::exp(m.log_prefactor) * strike_derivative(in, k, m.log_forward);
}

std::vector<std::size_t> active_indices(const ExpansionInputs& in) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in.weight_star[i] != 0.0) out.push_back(i);
  return out;
}

// sum_i a*_i * exp(lp) * d^k Black(exp(lf)) for a single-index identity.
double single_sum(const ExpansionInputs& in, int k, Identity id, const std::vector<std::size_t>& act) {
  CompensatedSum s;
  for (std::size_t i : act) s += in.weight_star[i] * term(in, k, identity_moment(in, id, i));
  return s.value();
}

struct PairKernels {
  double order2 = 0.0;
  double gp_order3 = 0.0;
  double order3 = 0.0;
};

PairKernels pair_kernels(const ExpansionInputs& in, std::size_t i, std::size_t j, int order) {
  const double w = in.weight_star[i] * in.weight_star[j];
  const Moment m6 = identity_moment(in, Identity::SiSjOverGn, i, j);
  PairKernels out;
  out.order2 = w * term(in, 2, m6);
  if (order >= 3) {
    out.order3 = w * term(in, 3, m6);
    out.gp_order3 = w * term(in, 3, identity_moment(in, Identity::SiSjGpOverGn2, i, j));
  }
  return out;
}

double triple_kernel(const ExpansionInputs& in, std::size_t i, std::size_t j, std::size_t k) {
  const double w = in.weight_star[i] * in.weight_star[j] * in.weight_star[k];
  return w * term(in, 3, identity_moment(in, Identity::SiSjSkOverGn2, i, j, k));
}

bool degenerate(const ExpansionInputs& in) { return in.degeneracy != Degeneracy::None; }

}  // namespace

const char* identity_label(Identity id) {
  switch (id) {
    case Identity::Gn:
      return "G_n";
    case Identity::Gp:
      return "G_p";
    case Identity::Si:
      return "S_i";
    case Identity::GpR:
      return "G_p*R";
    case Identity::SiR:
      return "S_i*R";
    case Identity::SiSjOverGn:
      return "S_i*S_j/G_n";
    case Identity::GpR2:
      return "G_p*R^2";
    case Identity::SiR2:
      return "S_i*R^2";
    case Identity::SiSjGpOverGn2:
      return "S_i*S_j*G_p/G_n^2";
    case Identity::SiSjSkOverGn2:
      return "S_i*S_j*S_k/G_n^2";
  }
  return "?";
}

Moment identity_moment(const ExpansionInputs& in, Identity id, std::size_t i, std::size_t j, std::size_t k) {
  const double nu2 = in.nu2;
  const double mr = in.log_mean_ratio();
  const auto& vb = in.vbar;
  const auto& vn = in.vbar_neg;
  const auto& v = in.cov;
  switch (id) {
    case Identity::Gn:
      return {0.0, 0.0};
    case Identity::Gp:
      return {0.0, nu2};
    case Identity::Si:
      return {0.0, mr + vb[i]};
    case Identity::GpR:
      return {nu2, 2.0 * nu2};
    case Identity::SiR:
      return {mr + vb[i], nu2 + mr + vb[i]};
    case Identity::SiSjOverGn:
      return {in.nu2_neg + v(ix(i), ix(j)) + vn[i] + vn[j], vb[i] + vb[j] + 2.0 * mr};
    case Identity::GpR2:
      return {3.0 * nu2, 3.0 * nu2};
    case Identity::SiR2:
      return {nu2 + 2.0 * mr + 2.0 * vb[i], 2.0 * nu2 + mr + vb[i]};
    case Identity::SiSjGpOverGn2:
      return {in.nu2_neg + 2.0 * mr + vb[i] + vb[j] + v(ix(i), ix(j)) + vn[i] + vn[j],
              vb[i] + vb[j] + nu2 + 2.0 * mr};
    case Identity::SiSjSkOverGn2:
      return {v(ix(i), ix(j)) + v(ix(i), ix(k)) + v(ix(j), ix(k)) + 2.0 * (vn[i] + vn[j] + vn[k]) +
                  3.0 * in.nu2_neg,
              vb[i] + vb[j] + vb[k] + 3.0 * mr};
  }
  throw std::invalid_argument("unknown identity");
}

std::vector<IdentityValue> identity_values(const ExpansionInputs& in, std::array<std::size_t, 3> idx) {
  for (std::size_t x : idx)
    if (x >= in.size()) throw std::out_of_range("identity asset index out of range");
  const double v = degenerate(in) ? 0.0 : in.nu2;
  std::vector<IdentityValue> out;
  for (int n = 1; n <= kIdentityCount; ++n) {
    const auto id = static_cast<Identity>(n);
    const Moment m = identity_moment(in, id, idx[0], idx[1], idx[2]);
    const BlackParams p{std::exp(m.log_forward), in.kappa_star, v, in.maturity, in.direction, in.discount};
    out.push_back({id, identity_label(id), std::exp(m.log_prefactor) * black(p)});
  }
  return out;
}

namespace detail {

MultiSums multi_sums(const ExpansionInputs& in, bool reduced, int order) {
  const auto act = active_indices(in);
  const std::size_t m = act.size();
  CompensatedSum p2, pg3, p3, t3;
  MultiSums out;

  if (reduced) {
    for (std::size_t a = 0; a < m; ++a) {
      const auto diag = pair_kernels(in, act[a], act[a], order);
      p2 += diag.order2;
      pg3 += diag.gp_order3;
      p3 += diag.order3;
      for (std::size_t b = 0; b < a; ++b) {
        const auto off = pair_kernels(in, act[a], act[b], order);
        p2 += 2.0 * off.order2;
        pg3 += 2.0 * off.gp_order3;
        p3 += 2.0 * off.order3;
      }
    }
    if (order >= 3) {
      for (std::size_t a = 0; a < m; ++a) {
        const std::size_t i = act[a];
        t3 += triple_kernel(in, i, i, i);
        ++out.triple_calls;
        for (std::size_t b = 0; b < a; ++b) {
          const std::size_t j = act[b];
          t3 += 3.0 * triple_kernel(in, i, j, j);
          t3 += 3.0 * triple_kernel(in, i, i, j);
          out.triple_calls += 2;
          for (std::size_t c = 0; c < b; ++c) {
            t3 += 6.0 * triple_kernel(in, i, j, act[c]);
            ++out.triple_calls;
          }
        }
      }
    }
  } else {
    for (std::size_t i : act) {
      for (std::size_t j : act) {
        const auto k = pair_kernels(in, i, j, order);
        p2 += k.order2;
        pg3 += k.gp_order3;
        p3 += k.order3;
        if (order >= 3) {
          for (std::size_t l : act) {
            t3 += triple_kernel(in, i, j, l);
            ++out.triple_calls;
          }
        }
      }
    }
  }
  out.pair_order2 = p2.value();
  out.pair_gp_order3 = pg3.value();
  out.pair_order3 = p3.value();
  out.triple_order3 = t3.value();
  return out;
}

}  // namespace detail

OrderedPrice price_expansion(const ExpansionInputs& in, int order) {
  if (order < 0 || order > 3) throw std::invalid_argument("expansion order must be 0..3");
  OrderedPrice out;
  out.order = order;
  out.vg.fill(std::numeric_limits<double>::quiet_NaN());
  out.vg[0] = price_vg0(in);
  out.terms[0] = {{"proxy", out.vg[0]}};
  if (degenerate(in)) {
    for (int k = 1; k <= order; ++k) out.vg[static_cast<std::size_t>(k)] = out.vg[0];
    return out;
  }

  const double ap = in.a_pos;
  const double ks = in.kappa_star;
  const auto act = active_indices(in);
  auto d = [&](int k, Identity id) { return term(in, k, identity_moment(in, id)); };

  auto finish = [&](int k) {
    CompensatedSum s;
    s += out.vg[static_cast<std::size_t>(k - 1)];
    for (const auto& t : out.terms[static_cast<std::size_t>(k)]) s += t.value;
    out.vg[static_cast<std::size_t>(k)] = s.value();
  };

  if (order >= 1) {
    // d/dK of Black(1) is the G_n* term, Black(e^{nu^2}) the G_p* term.
    out.terms[1] = {
        {"G_p", ap * d(1, Identity::Gp)},
        {"G_n", -ks * ap * d(1, Identity::Gn)},
        {"S_i", -ap * single_sum(in, 1, Identity::Si, act)},
    };
    finish(1);
  }
  if (order < 2) return out;

  const auto sums = detail::multi_sums(in, true, order);
  out.terms[2] = {
      {"G_p*R", 0.5 * ap * d(2, Identity::GpR)},
      {"G_n", 0.5 * ks * ks * ap * d(2, Identity::Gn)},
      {"G_p", -ks * ap * d(2, Identity::Gp)},
      {"S_i*R", -ap * single_sum(in, 2, Identity::SiR, act)},
      {"S_i", ks * ap * single_sum(in, 2, Identity::Si, act)},
      {"S_i*S_j/G_n", 0.5 * ap * sums.pair_order2},
  };
  finish(2);
  if (order < 3) return out;

  out.terms[3] = {
      {"G_p*R^2", ap / 6.0 * d(3, Identity::GpR2)},
      {"G_p*R", -0.5 * ap * ks * d(3, Identity::GpR)},
      {"G_p", 0.5 * ap * ks * ks * d(3, Identity::Gp)},
      {"G_n", -ap * ks * ks * ks / 6.0 * d(3, Identity::Gn)},
      {"S_i*R^2", -0.5 * ap * single_sum(in, 3, Identity::SiR2, act)},
      {"S_i", -0.5 * ap * ks * ks * single_sum(in, 3, Identity::Si, act)},
      {"S_i*R", ap * ks * single_sum(in, 3, Identity::SiR, act)},
      {"S_i*S_j*G_p/G_n^2", 0.5 * ap * sums.pair_gp_order3},
      {"S_i*S_j/G_n", -0.5 * ap * ks * sums.pair_order3},
      {"S_i*S_j*S_k/G_n^2", -ap / 6.0 * sums.triple_order3},
  };
  finish(3);
  return out;
}

double price_vg1(const ExpansionInputs& in) { return price_expansion(in, 1).vg[1]; }
double price_vg2(const ExpansionInputs& in) { return price_expansion(in, 2).vg[2]; }
double price_vg3(const ExpansionInputs& in) { return price_expansion(in, 3).vg[3]; }

SymmetryReport sum_symmetry_check(const ExpansionInputs& in, double tolerance) {
  SymmetryReport r;
  if (degenerate(in)) {
    r.equal = true;
    return r;
  }
  const auto reduced = detail::multi_sums(in, true, 3);
  const auto naive = detail::multi_sums(in, false, 3);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  r.max_diff = std::max({rel(reduced.pair_order2, naive.pair_order2),
                             rel(reduced.pair_gp_order3, naive.pair_gp_order3),
                             rel(reduced.pair_order3, naive.pair_order3),
                             rel(reduced.triple_order3, naive.triple_order3)});
  r.reduced_calls = reduced.triple_calls;
  r.naive_calls = naive.triple_calls;
  r.equal = r.max_diff <= tolerance;
  return r;
}

}  // namespace spreadkit
