#pragma once

#include <vector>

#include "qnd/common.hpp"
#include "qnd/state.hpp"

namespace qnd {

// Projection onto the Fock-offset sector |k1-k2| = delta, in the z, x or a
// custom (theta,phi) basis.  The 1/2^{delta_{D,0}} prefactor of the
// intermediate measurement operator never appears here: P is idempotent.
struct ProjectorSpec {
  int n_atoms;
  int delta;
  BasisTag basis = BasisTag::z();
};

inline std::vector<bool> projector_mask(int n_atoms, int delta) {
  require(delta >= 0 && delta <= n_atoms, "projector_mask: delta out of range");
  std::vector<bool> m(dim_of(n_atoms), false);
  for (int k2 = 0; k2 <= n_atoms; ++k2)
    for (int k1 = 0; k1 <= n_atoms; ++k1)
      if (std::abs(k1 - k2) == delta) m[flat_index(n_atoms, k1, k2)] = true;
  return m;
}

// rank(P_delta) = 2(N+1-delta) / 2^{delta_{D,0}}
inline int projector_rank(int n_atoms, int delta) {
  return delta == 0 ? n_atoms + 1 : 2 * (n_atoms + 1 - delta);
}

inline TwoEnsembleState mask_apply(const TwoEnsembleState& s, int delta) {
  const auto m = projector_mask(s.n_atoms(), delta);
  VecC a = s.amps();
  for (int i = 0; i < a.size(); ++i)
    if (!m[i]) a(i) = 0.0;
  return {s.n_atoms(), std::move(a), s.basis()};
}

// P^{(theta,phi)} psi = U P^{(z)} U^dag psi: rotate back, mask, rotate forward.
inline TwoEnsembleState apply_projector(const TwoEnsembleState& s, const ProjectorSpec& spec) {
  require(s.n_atoms() == spec.n_atoms, "apply_projector: size mismatch");
  switch (spec.basis.kind) {
    case Basis::Z:
      return mask_apply(s, spec.delta);
    case Basis::X: {
      auto t = apply_two_mode_rotation(s, M_PI / 2, 0.0, RotationDirection::Inverse);
      return apply_two_mode_rotation(mask_apply(t, spec.delta), M_PI / 2, 0.0);
    }
    case Basis::Custom: {
      auto t = apply_two_mode_rotation(s, spec.basis.theta, spec.basis.phi, RotationDirection::Inverse);
      return apply_two_mode_rotation(mask_apply(t, spec.delta), spec.basis.theta, spec.basis.phi);
    }
    default:
      throw std::domain_error("apply_projector: basis must be Z, X or Custom");
  }
}

// Dense real matrix, for oracle tests and the joint-SVD construction.
// Defined for z, x and custom bases with phi = 0 (all real orthogonal cases).
inline Mat projector_matrix(const ProjectorSpec& spec, int dense_limit = kDenseLimit) {
  require(spec.n_atoms <= dense_limit, "projector_matrix: N above dense limit");
  const int dim = dim_of(spec.n_atoms);
  const auto m = projector_mask(spec.n_atoms, spec.delta);
  Mat p = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    if (m[i]) p(i, i) = 1.0;
  double theta;
  switch (spec.basis.kind) {
    case Basis::Z: return p;
    case Basis::X: theta = M_PI / 2; break;
    case Basis::Custom:
      require(spec.basis.phi == 0.0, "projector_matrix: dense real form needs phi = 0");
      theta = spec.basis.theta;
      break;
    default:
      throw std::domain_error("projector_matrix: basis must be Z, X or Custom");
  }
  const Mat u1 = rotation_matrix(spec.n_atoms, theta, 0.0).real();
  Mat u2(dim, dim);  // kron(u1, u1), k1 fastest
  const int d = spec.n_atoms + 1;
  for (int a2 = 0; a2 < d; ++a2)
    for (int a1 = 0; a1 < d; ++a1)
      for (int b2 = 0; b2 < d; ++b2)
        for (int b1 = 0; b1 < d; ++b1) u2(a2 * d + a1, b2 * d + b1) = u1(a2, b2) * u1(a1, b1);
  return u2 * p * u2.transpose();
}

}  // namespace qnd
