#pragma once

#include <cmath>

#include "qnd/common.hpp"

namespace qnd {

enum class SpinAxis { X, Y, Z };

// Collective spin operators on one ensemble in the Fock basis |k>, k = number
// of excited atoms.  S^z = diag(2k-N); S^x, S^y are the Hermitian ladder
// combinations, normalized so that [S^j, S^k] = 2i eps_{jkl} S^l.
inline MatC spin_matrix(int n_atoms, SpinAxis axis) {
  require(n_atoms >= 1, "spin_matrix: n_atoms must be >= 1");
  const int d = n_atoms + 1;
  MatC s = MatC::Zero(d, d);
  switch (axis) {
    case SpinAxis::Z:
      for (int k = 0; k < d; ++k) s(k, k) = 2.0 * k - n_atoms;
      break;
    case SpinAxis::X:
      for (int k = 0; k + 1 < d; ++k) {
        const double c = std::sqrt(double(k + 1) * double(n_atoms - k));
        s(k + 1, k) = c;
        s(k, k + 1) = c;
      }
      break;
    case SpinAxis::Y:
      for (int k = 0; k + 1 < d; ++k) {
        const double c = std::sqrt(double(k + 1) * double(n_atoms - k));
        s(k + 1, k) = cplx(0, -c);
        s(k, k + 1) = cplx(0, +c);
      }
      break;
  }
  return s;
}

// Single-ensemble factor of the basis rotation U(theta,phi).  The theta part
// is exp(+i S^y theta/2), the convention fixed by the N=2 rotation matrix of
// the golden fixtures (the textbook-standard sign gives its transpose); the
// phi part is exp(-i S^z phi/2).  Unitary; real orthogonal when phi = 0.
inline MatC rotation_matrix(int n_atoms, double theta, double phi) {
  const int d = n_atoms + 1;
  Eigen::SelfAdjointEigenSolver<MatC> es(spin_matrix(n_atoms, SpinAxis::Y));
  VecC phase(d);
  for (int j = 0; j < d; ++j) phase(j) = std::exp(cplx(0, +theta / 2 * es.eigenvalues()(j)));
  MatC r = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
  if (phi != 0.0) {
    VecC zp(d);
    for (int k = 0; k < d; ++k) zp(k) = std::exp(cplx(0, -phi / 2 * (2.0 * k - n_atoms)));
    r = zp.asDiagonal() * r;
  }
  return r;
}

// Real orthogonal x-basis rotation, the pi/2 special case used throughout the
// projector and SVD machinery.
inline Mat x_rotation_matrix(int n_atoms) {
  return rotation_matrix(n_atoms, M_PI / 2, 0.0).real();
}

}  // namespace qnd
