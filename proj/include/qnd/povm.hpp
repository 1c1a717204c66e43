#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "qnd/common.hpp"
#include "qnd/state.hpp"

namespace qnd {

struct PhotonOutcome {
  int nc = 0;
  int nd = 0;
  bool operator==(const PhotonOutcome&) const = default;
};

// alpha taken real >= 0 (a complex alpha only adds a global phase per
// outcome); tau = Omega*t.  nMax truncates nc+nd so the neglected Poisson
// tail is < 1e-12.
struct PovmParams {
  double alpha = 1.0;
  double tau = 0.1;
  int n_max = -1;  // -1: default ceil(alpha^2 + 10 alpha + 20)

  int effective_n_max() const {
    return n_max >= 0 ? n_max : int(std::ceil(alpha * alpha + 10.0 * alpha + 20.0));
  }
  static double default_tau(int n_atoms) { return M_PI / (2.0 * n_atoms); }
};

namespace detail {
// log magnitude + sign, so that alpha ~ 100 and photon numbers ~ 1e4 stay
// finite (Fig. 2 runs at alpha = 50).
struct LogSigned {
  double log_mag;
  double sign;  // 0 when the value is exactly zero
  double value() const { return sign == 0.0 ? 0.0 : sign * std::exp(log_mag); }
};

inline LogSigned c_function_log(int nc, int nd, double chi, double alpha) {
  require(nc >= 0 && nd >= 0, "c_function: photon counts must be >= 0");
  if (alpha == 0.0) return {0.0, nc + nd == 0 ? 1.0 : 0.0};
  const double c = std::cos(chi), s = std::sin(chi);
  if ((nc > 0 && c == 0.0) || (nd > 0 && s == 0.0)) return {0.0, 0.0};
  double lm = (nc + nd) * std::log(alpha) - alpha * alpha / 2 -
              0.5 * (std::lgamma(nc + 1.0) + std::lgamma(nd + 1.0));
  double sign = 1.0;
  if (nc > 0) {
    lm += nc * std::log(std::abs(c));
    if (c < 0.0 && nc % 2) sign = -sign;
  }
  if (nd > 0) {
    lm += nd * std::log(std::abs(s));
    if (s < 0.0 && nd % 2) sign = -sign;
  }
  return {lm, sign};
}
}  // namespace detail

// C_{nc,nd}(chi) = alpha^{nc+nd} e^{-alpha^2/2} cos^{nc}(chi) sin^{nd}(chi) / sqrt(nc! nd!)
inline double c_function(int nc, int nd, double chi, double alpha) {
  return detail::c_function_log(nc, nd, chi, alpha).value();
}

// Bright-light approximation, nd >= 1 branch (Gaussian envelope in sin^2 chi).
inline double c_function_bright(int nc, int nd, double chi, double alpha) {
  require(nd >= 1, "c_function_bright: nd must be >= 1");
  const double s2 = std::sin(2 * chi);
  if (s2 == 0.0)
    throw std::domain_error("c_function_bright: sin(2 chi) = 0, Gaussian envelope undefined");
  const int n = nc + nd;
  const double c = std::cos(chi), s = std::sin(chi);
  double sign = 1.0;
  if (c < 0.0 && nc % 2) sign = -sign;
  if (s < 0.0 && nd % 2) sign = -sign;
  const double dev = s * s - double(nd) / n;
  const double lm = n * std::log(alpha) - alpha * alpha / 2 - 0.5 * std::lgamma(n + 1.0) -
                    0.25 * std::log(M_PI / 2 * n * s2 * s2) - n / (s2 * s2) * dev * dev;
  return sign * std::exp(lm);
}

// nd = 0 branch, exact at chi = 0.
inline double c_function_nd0(int nc, double chi, double alpha) {
  const double s = std::sin(chi);
  const double lm = nc * std::log(alpha) - alpha * alpha / 2 - 0.5 * std::lgamma(nc + 1.0) -
                    nc / 2.0 * s * s;
  return std::exp(lm);
}

// Diagonal POVM application: amplitude at (k1,k2) scaled by C[(k1-k2) tau].
inline TwoEnsembleState povm_apply(const TwoEnsembleState& s, PhotonOutcome o,
                                   const PovmParams& p) {
  require(s.basis().kind == Basis::Z, "povm_apply: state must be in the z basis");
  const int n = s.n_atoms();
  // only k1-k2 in [-N, N] occurs
  std::vector<double> cval(2 * n + 1);
  for (int d = -n; d <= n; ++d) cval[d + n] = c_function(o.nc, o.nd, d * p.tau, p.alpha);
  VecC a = s.amps();
  for (int k2 = 0; k2 <= n; ++k2)
    for (int k1 = 0; k1 <= n; ++k1) a(flat_index(n, k1, k2)) *= cval[k1 - k2 + n];
  return {n, std::move(a), s.basis()};
}

inline double outcome_probability(const TwoEnsembleState& s, PhotonOutcome o,
                                  const PovmParams& p) {
  return povm_apply(s, o, p).norm_sq();
}

// Exact truncated outcome distribution for one state; sampled by inverse CDF.
class OutcomeDistribution {
 public:
  OutcomeDistribution(const TwoEnsembleState& s, const PovmParams& p) {
    require(s.is_normalized(1e-8), "OutcomeDistribution: state must be normalized");
    const int n = s.n_atoms();
    // weight of each Fock offset d = k1-k2 in the state
    std::vector<double> w(2 * n + 1, 0.0);
    for (int k2 = 0; k2 <= n; ++k2)
      for (int k1 = 0; k1 <= n; ++k1)
        w[k1 - k2 + n] += std::norm(s.amps()(flat_index(n, k1, k2)));
    const int nmax = p.effective_n_max();
    double total = 0.0;
    for (int nc = 0; nc <= nmax; ++nc)
      for (int nd = 0; nd + nc <= nmax; ++nd) {
        double prob = 0.0;
        for (int d = -n; d <= n; ++d) {
          if (w[d + n] == 0.0) continue;
          const double c = c_function(nc, nd, d * p.tau, p.alpha);
          prob += w[d + n] * c * c;
        }
        if (prob > 0.0) {
          total += prob;
          outcomes_.push_back({nc, nd});
          cdf_.push_back(total);
        }
      }
    total_mass_ = total;
    if (total < 1.0 - 1e-9)
      throw std::runtime_error("OutcomeDistribution: truncated mass " + std::to_string(total) +
                               " < 1 - 1e-9; raise nMax");
  }

  double total_mass() const { return total_mass_; }

  template <class Rng>
  PhotonOutcome sample(Rng& rng) const {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double r = u01(rng) * total_mass_;
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), r);
    if (it == cdf_.end()) --it;
    return outcomes_[std::size_t(it - cdf_.begin())];
  }

  const std::vector<PhotonOutcome>& support() const { return outcomes_; }
  double probability_at(std::size_t i) const {
    return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
  }

 private:
  std::vector<PhotonOutcome> outcomes_;
  std::vector<double> cdf_;
  double total_mass_ = 0.0;
};

template <class Rng>
PhotonOutcome sample_outcome(const TwoEnsembleState& s, const PovmParams& p, Rng& rng) {
  return OutcomeDistribution(s, p).sample(rng);
}

// Candidate Fock offsets from a photon readout: |Delta| = asin(sqrt(nd/(nc+nd)))/tau,
// rounded to the nearest integer, both signs returned.  The residual reports
// how far the real-valued offset sits from the integer grid.
struct DeltaEstimate {
  int delta_plus;
  int delta_minus;
  double delta_real;
  double residual;
};

inline DeltaEstimate delta_from_outcome(PhotonOutcome o, double tau) {
  if (o.nc + o.nd == 0)
    throw std::domain_error("delta_from_outcome: nc + nd = 0, offset undefined");
  const double frac = double(o.nd) / double(o.nc + o.nd);
  const double dr = std::asin(std::min(1.0, std::sqrt(frac))) / tau;
  const int di = int(std::lround(dr));
  return {di, -di, dr, std::abs(dr - di)};
}

}  // namespace qnd
