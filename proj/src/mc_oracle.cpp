#include "spreadkit/mc_oracle.hpp"

#include "spreadkit/philox.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>

namespace spreadkit {

namespace {

Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_config(const McConfig& c) {
  if (c.batches < 2) throw ValidationError("monte carlo needs at least two batches");
  if (c.paths < 2ull * c.batches) throw ValidationError("monte carlo needs paths >= 2 * batches");
}

// Runs `Eval` (copied per worker thread) over all paths and reduces to batch
// means. Eval provides dims(), controls(), control_means() and
// operator()(z, out) writing the outputs followed by the control values.
// Controls enter through one regression coefficient per output, estimated on
// all paths; batch means are adjusted before the standard error is taken.
template <class Eval>
std::vector<McResult> run(const Eval& proto, std::size_t outputs, const McConfig& config) {
  check_config(config);
  const std::size_t dims = proto.dims();
  const std::size_t nc = config.control_variate ? proto.controls() : 0;
  const std::size_t width = outputs + proto.controls();
  std::vector<McResult> results(outputs);

  if (dims == 0) {
    Eval eval = proto;
    std::vector<double> out(width);
    eval(std::span<const double>{}, out);
    for (std::size_t o = 0; o < outputs; ++o) results[o] = {out[o], 0.0, config.paths};
    return results;
  }

  const std::uint64_t unit = config.antithetic ? 2 : 1;
  const std::uint64_t batches = config.batches;
  const std::uint64_t per_batch = std::max<std::uint64_t>(1, config.paths / (unit * batches));
  const Philox4x32 gen(config.seed);
  const std::vector<double> cmean = proto.control_means();

  // per batch: sum y (outputs), sum x' (nc), sum x' y (nc*outputs), sum x' x' (nc*nc); x' = x - E[x]
  const std::size_t stride = outputs + nc + nc * outputs + nc * nc;
  std::vector<double> acc(batches * stride, 0.0);

  auto work = [&](unsigned worker, unsigned workers) {
    Eval eval = proto;
    std::vector<double> z(dims), out(width), out_anti(width), v(width);
    for (std::uint64_t b = worker; b < batches; b += workers) {
      double* a = acc.data() + b * stride;
      for (std::uint64_t s = 0; s < per_batch; ++s) {
        fill_normals(gen, b * per_batch + s, z);
        eval(z, out);
        if (config.antithetic) {
          for (double& x : z) x = -x;
          eval(z, out_anti);
          for (std::size_t o = 0; o < width; ++o) v[o] = 0.5 * (out[o] + out_anti[o]);
        } else {
          v = out;
        }
        for (std::size_t o = 0; o < outputs; ++o) a[o] += v[o];
        for (std::size_t c = 0; c < nc; ++c) {
          const double x = v[outputs + c] - cmean[c];
          a[outputs + c] += x;
          for (std::size_t o = 0; o < outputs; ++o) a[outputs + nc + c * outputs + o] += x * v[o];
          for (std::size_t d = 0; d < nc; ++d)
            a[outputs + nc + nc * outputs + c * nc + d] += x * (v[outputs + d] - cmean[d]);
        }
      }
    }
  };

  const unsigned workers = std::min<unsigned>(mc_thread_count(config), static_cast<unsigned>(batches));
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work, t, workers);
    for (auto& th : pool) th.join();
  }

  const auto nb = static_cast<double>(batches);
  const auto n = static_cast<double>(per_batch * batches);
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(ix(nc), ix(outputs));
  if (nc > 0) {
    // centred cross moments over all samples, summed in batch order
    Eigen::VectorXd sx = Eigen::VectorXd::Zero(ix(nc));
    Eigen::VectorXd sy = Eigen::VectorXd::Zero(ix(outputs));
    Eigen::MatrixXd sxy = Eigen::MatrixXd::Zero(ix(nc), ix(outputs));
    Eigen::MatrixXd sxx = Eigen::MatrixXd::Zero(ix(nc), ix(nc));
    for (std::uint64_t b = 0; b < batches; ++b) {
      const double* a = acc.data() + b * stride;
      for (std::size_t o = 0; o < outputs; ++o) sy(ix(o)) += a[o];
      for (std::size_t c = 0; c < nc; ++c) {
        sx(ix(c)) += a[outputs + c];
        for (std::size_t o = 0; o < outputs; ++o) sxy(ix(c), ix(o)) += a[outputs + nc + c * outputs + o];
        for (std::size_t d = 0; d < nc; ++d) sxx(ix(c), ix(d)) += a[outputs + nc + nc * outputs + c * nc + d];
      }
    }
    const Eigen::MatrixXd cxx = sxx - sx * sx.transpose() / n;
    const Eigen::MatrixXd cxy = sxy - sx * sy.transpose() / n;
    beta = cxx.completeOrthogonalDecomposition().solve(cxy);
  }

  for (std::size_t o = 0; o < outputs; ++o) {
    std::vector<double> means(batches);
    for (std::uint64_t b = 0; b < batches; ++b) {
      const double* a = acc.data() + b * stride;
      double m = a[o];
      for (std::size_t c = 0; c < nc; ++c) m -= beta(ix(c), ix(o)) * a[outputs + c];
      means[b] = m / static_cast<double>(per_batch);
    }
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= nb;
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    results[o] = {mean, std::sqrt(ss / (nb - 1.0) / nb), per_batch * unit * batches};
  }
  return results;
}

// Terminal basket value split into legs, for a ladder of strikes.
class BasketEval {
 public:
  BasketEval(const BasketSpreadInstrument& instr, const MarketModel& model, std::span<const double> strikes,
             StrikeKind kind)
      : instr_(instr), strikes_(strikes.begin(), strikes.end()), kind_(kind), discount_(model.discount_factor) {
    const auto cov = canonical_covariance(model, instr.maturity);
    factor_ = pivoted_cholesky(cov.entries);
    const std::size_t n = model.size();
    log_drift_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      log_drift_[i] = std::log(model.assets[i].forward) - 0.5 * cov.entries(ix(i), ix(i));
    for (std::size_t i = 0; i < n; ++i) {
      const double w = instr.weights[i];
      (w > 0.0 ? leg_means_[0] : leg_means_[1]) += w * model.assets[i].forward;
    }
    x_.resize(ix(n));
  }

  std::size_t dims() const { return static_cast<std::size_t>(factor_.cols()); }
  // the two legs, whose expectations are the weighted forwards
  std::size_t controls() const { return 2; }
  std::vector<double> control_means() const { return {leg_means_[0], leg_means_[1]}; }

  void operator()(std::span<const double> z, std::span<double> out) {
    if (dims() > 0) x_.noalias() = factor_ * Eigen::Map<const Eigen::VectorXd>(z.data(), ix(z.size()));
    else x_.setZero();
    double pos = 0.0;
    double neg = 0.0;
    for (std::size_t i = 0; i < log_drift_.size(); ++i) {
      const double w = instr_.weights[i];
      if (w == 0.0) continue;
      const double s = w * std::exp(log_drift_[i] + x_(ix(i)));
      (w > 0.0 ? pos : neg) += s;
    }
    const double e = eta(instr_.direction);
    for (std::size_t k = 0; k < strikes_.size(); ++k) {
      const double kappa = kind_ == StrikeKind::Multiplicative ? strikes_[k] : instr_.mult_strike;
      const double strike = kind_ == StrikeKind::Additive ? strikes_[k] : instr_.strike;
      out[k] = discount_ * std::max(e * (pos + kappa * neg - strike), 0.0);
    }
    out[strikes_.size()] = pos;
    out[strikes_.size() + 1] = neg;
  }

 private:
  BasketSpreadInstrument instr_;
  std::vector<double> strikes_;
  StrikeKind kind_;
  double discount_;
  double leg_means_[2] = {0.0, 0.0};
  Eigen::MatrixXd factor_;
  std::vector<double> log_drift_;
  Eigen::VectorXd x_;
};

// Log-forward paths of each underlying at the unfixed observation dates.
class AsianEval {
 public:
  AsianEval(const AsianBasketSpec& spec, const BasketSpreadInstrument& instr, const MarketModel& model,
            std::span<const double> strikes, StrikeKind kind)
      : instr_(instr), strikes_(strikes.begin(), strikes.end()), kind_(kind), discount_(model.discount_factor) {
    spec.validate();
    model.validate();
    const std::size_t m = spec.asset_count();
    if (m != model.size() || instr.weights.size() != m)
      throw ValidationError("asian basket: weight count does not match asset count");
    m_ = m;

    double prev = 0.0;
    for (std::size_t i = 0; i < spec.obs_count(); ++i) {
      const double t = spec.obs_times[i];
      Step step;
      bool simulated = false;
      for (std::size_t j = 0; j < m; ++j) {
        const double w = instr.weights[j] * spec.asian_weight(j, i);
        if (i < spec.fixing_count(j)) {
          if (t > 0.0) throw ValidationError("fixing supplied for a future observation");
          (w > 0.0 ? fixed_pos_ : fixed_neg_) += w * spec.fixings[j][i];
          (w > 0.0 ? leg_means_[0] : leg_means_[1]) += w * spec.fixings[j][i];
          step.weight.push_back(0.0);
        } else {
          if (w != 0.0 && t < 0.0) throw ValidationError("past observation without a fixing");
          step.weight.push_back(w);
          simulated = simulated || w != 0.0;
          if (w != 0.0) (w > 0.0 ? leg_means_[0] : leg_means_[1]) += w * model.assets[j].forward_at(t, spec.maturity);
        }
      }
      if (!simulated) continue;
      Eigen::MatrixXd inc(ix(m), ix(m));
      step.log_drift.resize(m);
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t l = 0; l < m; ++l) {
          const auto& a = model.assets[j].vol;
          const auto& b = model.assets[l].vol;
          inc(ix(j), ix(l)) = model.correlation(ix(j), ix(l)) *
                              (VolCurve::cross_integral(a, b, t) - VolCurve::cross_integral(a, b, prev));
        }
        step.log_drift[j] = std::log(model.assets[j].forward_at(t, spec.maturity)) - 0.5 * model.assets[j].vol.variance(t);
      }
      step.factor = pivoted_cholesky(inc);
      dims_ += static_cast<std::size_t>(step.factor.cols());
      steps_.push_back(std::move(step));
      prev = std::max(t, 0.0);
    }
    level_ = Eigen::VectorXd::Zero(ix(m));
  }

  std::size_t dims() const { return dims_; }
  std::size_t controls() const { return 2; }
  std::vector<double> control_means() const { return {leg_means_[0], leg_means_[1]}; }

  void operator()(std::span<const double> z, std::span<double> out) {
    level_.setZero();
    double pos = fixed_pos_;
    double neg = fixed_neg_;
    std::size_t offset = 0;
    for (const auto& step : steps_) {
      const auto r = step.factor.cols();
      if (r > 0) level_.noalias() += step.factor * Eigen::Map<const Eigen::VectorXd>(z.data() + offset, r);
      offset += static_cast<std::size_t>(r);
      for (std::size_t j = 0; j < m_; ++j) {
        const double w = step.weight[j];
        if (w == 0.0) continue;
        (w > 0.0 ? pos : neg) += w * std::exp(step.log_drift[j] + level_(ix(j)));
      }
    }
    const double e = eta(instr_.direction);
    for (std::size_t k = 0; k < strikes_.size(); ++k) {
      const double kappa = kind_ == StrikeKind::Multiplicative ? strikes_[k] : instr_.mult_strike;
      const double strike = kind_ == StrikeKind::Additive ? strikes_[k] : instr_.strike;
      out[k] = discount_ * std::max(e * (pos + kappa * neg - strike), 0.0);
    }
    out[strikes_.size()] = pos;
    out[strikes_.size() + 1] = neg;
  }

 private:
  struct Step {
    Eigen::MatrixXd factor;
    std::vector<double> weight;
    std::vector<double> log_drift;
  };
  BasketSpreadInstrument instr_;
  std::vector<double> strikes_;
  StrikeKind kind_;
  double discount_;
  std::size_t m_ = 0;
  std::size_t dims_ = 0;
  double fixed_pos_ = 0.0;
  double fixed_neg_ = 0.0;
  double leg_means_[2] = {0.0, 0.0};
  std::vector<Step> steps_;
  Eigen::VectorXd level_;
};

class IdentityEval {
 public:
  IdentityEval(const ExpansionInputs& in, std::array<std::size_t, 3> idx) : in_(in), idx_(idx) {
    for (std::size_t x : idx)
      if (x >= in.size()) throw std::out_of_range("identity asset index out of range");
    factor_ = pivoted_cholesky(in.cov);
    x_.resize(ix(in.size()));
    log_s_.resize(in.size());
  }

  std::size_t dims() const { return static_cast<std::size_t>(factor_.cols()); }
  std::size_t controls() const { return 0; }
  std::vector<double> control_means() const { return {}; }

  void operator()(std::span<const double> z, std::span<double> out) {
    const std::size_t n = in_.size();
    if (dims() > 0) x_.noalias() = factor_ * Eigen::Map<const Eigen::VectorXd>(z.data(), ix(z.size()));
    else x_.setZero();
    double log_gp = std::log(in_.alpha);
    double log_gn = std::log(in_.beta);
    for (std::size_t i = 0; i < n; ++i) {
      log_s_[i] = x_(ix(i)) - 0.5 * in_.cov(ix(i), ix(i));
      if (in_.leg[i] > 0) log_gp += in_.exponent[i] * log_s_[i];
      if (in_.leg[i] < 0) log_gn -= in_.exponent[i] * log_s_[i];
    }
    const double gp = std::exp(log_gp);
    const double gn = std::exp(log_gn);
    const double ratio = gp / gn;
    const double h = in_.discount * std::max(eta(in_.direction) * (ratio - in_.kappa_star), 0.0);
    const double si = std::exp(log_s_[idx_[0]]);
    const double sj = std::exp(log_s_[idx_[1]]);
    const double sk = std::exp(log_s_[idx_[2]]);
    out[0] = gn * h;
    out[1] = gp * h;
    out[2] = si * h;
    out[3] = gp * ratio * h;
    out[4] = si * ratio * h;
    out[5] = si * sj / gn * h;
    out[6] = gp * ratio * ratio * h;
    out[7] = si * ratio * ratio * h;
    out[8] = si * sj * gp / (gn * gn) * h;
    out[9] = si * sj * sk / (gn * gn) * h;
  }

 private:
  ExpansionInputs in_;
  std::array<std::size_t, 3> idx_;
  Eigen::MatrixXd factor_;
  Eigen::VectorXd x_;
  std::vector<double> log_s_;
};

}  // namespace

Eigen::MatrixXd pivoted_cholesky(const Eigen::MatrixXd& cov, double tol) {
  const Eigen::Index n = cov.rows();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd d = cov.diagonal();

  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    for (Eigen::Index i = k + 1; i < n; ++i)
      if (d(i) > d(p)) p = i;
    if (d(p) < tol) break;
    std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(p)]);
    std::swap(d(k), d(p));
    l.row(k).swap(l.row(p));

    const double pivot = std::sqrt(d(k));
    l(k, k) = pivot;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      double s = cov(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(k)]);
      for (Eigen::Index j = 0; j < k; ++j) s -= l(i, j) * l(k, j);
      l(i, k) = s / pivot;
      d(i) -= l(i, k) * l(i, k);
    }
    rank = k + 1;
  }
  for (Eigen::Index i = rank; i < n; ++i)
    if (d(i) < -tol) throw ValidationError("covariance matrix is not positive semidefinite (cholesky failed)");

  Eigen::MatrixXd out(n, rank);
  for (Eigen::Index i = 0; i < n; ++i) out.row(perm[static_cast<std::size_t>(i)]) = l.row(i).head(rank);
  return out;
}

unsigned mc_thread_count(const McConfig& config) {
  unsigned n = config.threads;
  if (n == 0) {
    if (const char* env = std::getenv("SPREADKIT_THREADS")) {
      try {
        n = static_cast<unsigned>(std::stoul(env));
      } catch (const std::exception&) {
        n = 0;
      }
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

McResult mc_price(const BasketSpreadInstrument& instr, const MarketModel& model, const McConfig& config) {
  instr.validate(model.size());
  const double strike[] = {instr.strike};
  return run(BasketEval(instr, model, strike, StrikeKind::Additive), 1, config).front();
}

std::vector<McResult> mc_price_ladder(const BasketSpreadInstrument& instr, const MarketModel& model,
                                      std::span<const double> strikes, StrikeKind kind, const McConfig& config) {
  instr.validate(model.size());
  return run(BasketEval(instr, model, strikes, kind), strikes.size(), config);
}

std::vector<McResult> mc_price_asian_ladder(const AsianBasketSpec& spec, const BasketSpreadInstrument& instr,
                                            const MarketModel& model, std::span<const double> strikes,
                                            StrikeKind kind, const McConfig& config) {
  return run(AsianEval(spec, instr, model, strikes, kind), strikes.size(), config);
}

std::array<McResult, kIdentityCount> mc_identity_lhs_all(const ExpansionInputs& in,
                                                         std::array<std::size_t, 3> indices,
                                                         const McConfig& config) {
  const auto r = run(IdentityEval(in, indices), kIdentityCount, config);
  std::array<McResult, kIdentityCount> out;
  std::copy(r.begin(), r.end(), out.begin());
  return out;
}

McResult mc_identity_lhs(Identity id, const ExpansionInputs& in, std::array<std::size_t, 3> indices,
                         const McConfig& config) {
  return mc_identity_lhs_all(in, indices, config)[static_cast<std::size_t>(id) - 1];
}

}  // namespace spreadkit
