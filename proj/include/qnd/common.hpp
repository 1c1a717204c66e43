#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qnd {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using VecC = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using MatC = Eigen::MatrixXcd;

inline constexpr const char* kToolVersion = "1.0.0";

// dense-oracle size guard for (N+1)^2 x (N+1)^2 projector matrices
inline constexpr int kDenseLimit = 12;

inline int dim_of(int n_atoms) { return (n_atoms + 1) * (n_atoms + 1); }

// flattened two-ensemble index, k1 fastest: [k] = k2*(N+1) + k1
inline int flat_index(int n_atoms, int k1, int k2) { return k2 * (n_atoms + 1) + k1; }
inline int k1_of(int n_atoms, int k) { return k % (n_atoms + 1); }
inline int k2_of(int n_atoms, int k) { return k / (n_atoms + 1); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace qnd
