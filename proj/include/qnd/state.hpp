#pragma once

#include <cmath>
#include <utility>

#include "qnd/common.hpp"
#include "qnd/spin.hpp"

namespace qnd {

enum class Basis : std::uint8_t { Z, X, V, U, Custom };

struct BasisTag {
  Basis kind = Basis::Z;
  double theta = 0.0;  // Custom only
  double phi = 0.0;

  static BasisTag z() { return {Basis::Z}; }
  static BasisTag x() { return {Basis::X}; }
  static BasisTag v() { return {Basis::V}; }
  static BasisTag u() { return {Basis::U}; }
  static BasisTag custom(double theta, double phi) { return {Basis::Custom, theta, phi}; }
};

inline const char* basis_name(Basis b) {
  switch (b) {
    case Basis::Z: return "z";
    case Basis::X: return "x";
    case Basis::V: return "V";
    case Basis::U: return "U";
    default: return "custom";
  }
}

// Pure state of two ensembles of n atoms each: complex amplitudes over the
// (N+1)^2 Fock basis, flattened with k1 fastest, plus a basis tag and a
// cached squared norm.  Unnormalized states are first-class (sequence
// probabilities are norms); normalization is always explicit.
class TwoEnsembleState {
 public:
  TwoEnsembleState(int n_atoms, VecC amps, BasisTag basis = BasisTag::z())
      : n_(n_atoms), basis_(basis), amps_(std::move(amps)) {
    require(n_ >= 1, "TwoEnsembleState: n_atoms must be >= 1");
    require(amps_.size() == dim_of(n_), "TwoEnsembleState: amplitude length != (N+1)^2");
    norm_sq_ = amps_.squaredNorm();
  }

  int n_atoms() const { return n_; }
  int dim() const { return dim_of(n_); }
  const VecC& amps() const { return amps_; }
  BasisTag basis() const { return basis_; }
  double norm_sq() const { return norm_sq_; }
  bool is_normalized(double tol = 1e-10) const { return std::abs(norm_sq_ - 1.0) < tol; }

  cplx amp(int k1, int k2) const { return amps_(flat_index(n_, k1, k2)); }

  TwoEnsembleState normalized() const {
    require(norm_sq_ > 0.0, "normalized: zero-norm state");
    return {n_, amps_ / std::sqrt(norm_sq_), basis_};
  }

  TwoEnsembleState with_basis(BasisTag b) const { return {n_, amps_, b}; }

 private:
  int n_;
  BasisTag basis_;
  VecC amps_;
  double norm_sq_;
};

inline TwoEnsembleState fock_state(int n_atoms, int k1, int k2) {
  require(n_atoms >= 1, "fock_state: n_atoms must be >= 1");
  require(k1 >= 0 && k1 <= n_atoms && k2 >= 0 && k2 <= n_atoms, "fock_state: k out of range");
  VecC a = VecC::Zero(dim_of(n_atoms));
  a(flat_index(n_atoms, k1, k2)) = 1.0;
  return {n_atoms, std::move(a)};
}

// Per-ensemble coherent amplitudes sqrt(C(N,k)) e^{i(N-k)phi} cos^k(theta/2) sin^{N-k}(theta/2).
inline VecC coherent_amplitudes(int n_atoms, double theta, double phi) {
  const int d = n_atoms + 1;
  VecC a(d);
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  double log_binom = 0.0;  // log C(N,k), updated incrementally
  for (int k = 0; k < d; ++k) {
    if (k > 0) log_binom += std::log(double(n_atoms - k + 1)) - std::log(double(k));
    double mag = std::exp(0.5 * log_binom) * std::pow(c, k) * std::pow(s, n_atoms - k);
    a(k) = mag * std::exp(cplx(0, (n_atoms - k) * phi));
  }
  return a;
}

// Product of two identical spin coherent states |theta,phi>> x |theta,phi>>.
inline TwoEnsembleState spin_coherent_pair(int n_atoms, double theta, double phi) {
  VecC one = coherent_amplitudes(n_atoms, theta, phi);
  VecC a(dim_of(n_atoms));
  for (int k2 = 0; k2 <= n_atoms; ++k2)
    for (int k1 = 0; k1 <= n_atoms; ++k1) a(flat_index(n_atoms, k1, k2)) = one(k1) * one(k2);
  return {n_atoms, std::move(a)};
}

// Maximally entangled state (N+1)^{-1/2} sum_k |k,k>.
inline TwoEnsembleState epr_state(int n_atoms) {
  VecC a = VecC::Zero(dim_of(n_atoms));
  const double w = 1.0 / std::sqrt(double(n_atoms + 1));
  for (int k = 0; k <= n_atoms; ++k) a(flat_index(n_atoms, k, k)) = w;
  return {n_atoms, std::move(a)};
}

// Amplitudes viewed as the (N+1)x(N+1) matrix M(k1,k2).
inline MatC amplitude_matrix(const TwoEnsembleState& s) {
  const int d = s.n_atoms() + 1;
  MatC m(d, d);
  for (int k2 = 0; k2 < d; ++k2)
    for (int k1 = 0; k1 < d; ++k1) m(k1, k2) = s.amps()(k2 * d + k1);
  return m;
}

inline TwoEnsembleState state_from_amplitude_matrix(int n_atoms, const MatC& m, BasisTag basis) {
  const int d = n_atoms + 1;
  VecC a(dim_of(n_atoms));
  for (int k2 = 0; k2 < d; ++k2)
    for (int k1 = 0; k1 < d; ++k1) a(k2 * d + k1) = m(k1, k2);
  return {n_atoms, std::move(a), basis};
}

enum class RotationDirection { Forward, Inverse };

// Mode-wise application of U(theta,phi) x U(theta,phi): two (N+1)x(N+1)
// contractions, M' = u M u^T (forward) or u^dag M u^* (inverse); the
// (N+1)^2 x (N+1)^2 matrix is never materialized.
inline TwoEnsembleState apply_two_mode_rotation(const TwoEnsembleState& s, double theta, double phi,
                                                RotationDirection dir = RotationDirection::Forward) {
  const MatC u = rotation_matrix(s.n_atoms(), theta, phi);
  const MatC m = amplitude_matrix(s);
  MatC out = dir == RotationDirection::Forward ? MatC(u * m * u.transpose())
                                               : MatC(u.adjoint() * m * u.conjugate());
  return state_from_amplitude_matrix(s.n_atoms(), out, s.basis());
}

inline cplx inner_product(const TwoEnsembleState& a, const TwoEnsembleState& b) {
  require(a.n_atoms() == b.n_atoms(), "inner_product: size mismatch");
  return a.amps().dot(b.amps());  // Eigen dot conjugates the left argument
}

// Reduced density matrix on ensemble 1 (ensemble 2 traced out); trace 1.
inline MatC partial_trace_first(const TwoEnsembleState& s) {
  require(s.norm_sq() > 0.0, "partial_trace_first: zero-norm state");
  MatC m = amplitude_matrix(s);
  return (m * m.adjoint()) / s.norm_sq();
}

inline MatC partial_trace_first(int n_atoms, const MatC& rho) {
  const int d = n_atoms + 1;
  require(rho.rows() == dim_of(n_atoms) && rho.cols() == dim_of(n_atoms),
          "partial_trace_first: dimension mismatch");
  MatC r = MatC::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) r(a, b) += rho(c * d + a, c * d + b);
  return r;
}

// von Neumann entropy of the reduced state, in bits; 0 <= E <= log2(N+1).
inline double entanglement_entropy(const TwoEnsembleState& s) {
  Eigen::SelfAdjointEigenSolver<MatC> es(partial_trace_first(s));
  double e = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam > 1e-15) e -= lam * std::log2(lam);
  }
  return e < 0.0 ? 0.0 : e;
}

// |<target|state>|^2 / <state|state>; target must be normalized.
inline double fidelity_to(const TwoEnsembleState& state, const TwoEnsembleState& target) {
  require(state.norm_sq() > 0.0, "fidelity_to: zero-norm state");
  require(target.is_normalized(1e-8), "fidelity_to: target not normalized");
  return std::norm(inner_product(target, state)) / state.norm_sq();
}

}  // namespace qnd
