#pragma once

#include "spreadkit/proxy.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace spreadkit {

struct Term {
  std::string label;
  double value = 0.0;
};

/// Prices for orders 0..order. terms[k] holds the labelled summands of
/// vg[k] - vg[k-1] (terms[0] holds the proxy price itself).
struct OrderedPrice {
  int order = 3;
  std::array<double, 4> vg{};
  std::array<std::vector<Term>, 4> terms;
};

OrderedPrice price_expansion(const ExpansionInputs& in, int order = 3);

double price_vg1(const ExpansionInputs& in);
double price_vg2(const ExpansionInputs& in);
double price_vg3(const ExpansionInputs& in);

/// Change-of-measure expectations E[B X h(G_p*/G_n* - kappa*)], numbered in
/// the order they are used by the expansion. Each closes to
/// exp(log_prefactor) * Black(exp(log_forward), kappa*, nu^2, T).
enum class Identity : int {
  Gn = 1,          // X = G_n*
  Gp = 2,          // X = G_p*
  Si = 3,          // X = S_i*
  GpR = 4,         // X = G_p* R,             R = G_p*/G_n*
  SiR = 5,         // X = S_i* R
  SiSjOverGn = 6,  // X = S_i* S_j* / G_n*
  GpR2 = 7,        // X = G_p* R^2
  SiR2 = 8,        // X = S_i* R^2
  SiSjGpOverGn2 = 9,    // X = S_i* S_j* G_p* / G_n*^2
  SiSjSkOverGn2 = 10,   // X = S_i* S_j* S_k* / G_n*^2
};

constexpr int kIdentityCount = 10;

const char* identity_label(Identity id);

struct Moment {
  double log_prefactor = 0.0;
  double log_forward = 0.0;
};

Moment identity_moment(const ExpansionInputs& in, Identity id, std::size_t i = 0, std::size_t j = 0,
                       std::size_t k = 0);

struct IdentityValue {
  Identity id;
  std::string label;
  double value;
};

/// Closed-form right-hand sides of all identities at asset indices (i, j, k).
std::vector<IdentityValue> identity_values(const ExpansionInputs& in, std::array<std::size_t, 3> indices);

struct SymmetryReport {
  bool equal = false;
  double max_diff = 0.0;  // |reduced - naive| / max(1, |naive|)
  std::size_t reduced_calls = 0;  // kernel calls of the reduced triple sum
  std::size_t naive_calls = 0;
};

/// Compares the symmetry-reduced double and triple sums with naive full sums.
SymmetryReport sum_symmetry_check(const ExpansionInputs& in, double tolerance = 1e-12);

namespace detail {

/// The three multi-index sums of orders 2 and 3 (without their A_p scalar
/// coefficients), evaluated either via the symmetry split or naively.
struct MultiSums {
  double pair_order2 = 0.0;       // sum_ij a*_i a*_j I6 kernel, 2nd derivative
  double pair_gp_order3 = 0.0;    // sum_ij a*_i a*_j I9 kernel, 3rd derivative
  double pair_order3 = 0.0;       // sum_ij a*_i a*_j I6 kernel, 3rd derivative
  double triple_order3 = 0.0;     // sum_ijk a*_i a*_j a*_k I10 kernel, 3rd derivative
  std::size_t triple_calls = 0;
};

MultiSums multi_sums(const ExpansionInputs& in, bool reduced, int order);

}  // namespace detail

}  // namespace spreadkit
