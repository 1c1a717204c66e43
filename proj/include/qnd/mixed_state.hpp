#pragma once

#include <vector>

#include "qnd/common.hpp"
#include "qnd/fast_strobe.hpp"
#include "qnd/joint_svd.hpp"
#include "qnd/state.hpp"

namespace qnd {

// Outcome-averaged density-matrix evolution over z/x projection rounds and
// the steady-state eigenproblem of the transition matrix A.

struct DensityMatrix {
  int n_atoms = 0;
  BasisTag basis = BasisTag::z();
  MatC rho;

  static DensityMatrix pure(const TwoEnsembleState& s) {
    const auto sn = s.normalized();
    return {s.n_atoms(), s.basis(), sn.amps() * sn.amps().adjoint()};
  }
  static DensityMatrix maximally_mixed(int n_atoms, BasisTag b = BasisTag::z()) {
    const int dim = dim_of(n_atoms);
    return {n_atoms, b, MatC::Identity(dim, dim) / double(dim)};
  }
  double trace() const { return rho.trace().real(); }
  double hermiticity_residual() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }
  Vec diagonal() const { return rho.diagonal().real(); }
};

inline DensityMatrix to_v_basis(const DensityMatrix& r, const JointSvd& jsvd) {
  require(r.basis.kind == Basis::Z, "to_v_basis: input must be z-tagged");
  const MatC v = jsvd.v.cast<cplx>();
  return {r.n_atoms, BasisTag::v(), v.adjoint() * r.rho * v};
}

namespace detail {
// rho' = sum_{dx,dz} Lambda rho Lambda^T as a gather-scatter over the mapped
// index pairs of each factor; O(sector^2) per (dx,dz) pair
inline MatC kraus_forward(const MatC& rho, const JointSvd& jsvd) {
  const int n = jsvd.n_atoms, dim = jsvd.dim();
  MatC out = MatC::Zero(dim, dim);
  for (int dx = 0; dx <= n; ++dx)
    for (int dz = 0; dz <= n; ++dz) {
      const LambdaFactor& f = jsvd.factor(dx, dz);
      std::vector<int> cols;
      for (int k = 0; k < dim; ++k)
        if (f.forward[std::size_t(k)] >= 0) cols.push_back(k);
      for (int i : cols)
        for (int j : cols)
          out(f.forward[std::size_t(i)], f.forward[std::size_t(j)]) +=
              f.amp[std::size_t(i)] * f.amp[std::size_t(j)] * rho(i, j);
    }
  return out;
}

inline MatC kraus_backward(const MatC& rho, const JointSvd& jsvd) {
  const int n = jsvd.n_atoms, dim = jsvd.dim();
  MatC out = MatC::Zero(dim, dim);
  for (int dx = 0; dx <= n; ++dx)
    for (int dz = 0; dz <= n; ++dz) {
      const LambdaFactor& f = jsvd.factor(dx, dz);
      std::vector<int> cols;
      for (int k = 0; k < dim; ++k)
        if (f.forward[std::size_t(k)] >= 0) cols.push_back(k);
      for (int i : cols)
        for (int j : cols)
          out(i, j) += f.amp[std::size_t(i)] * f.amp[std::size_t(j)] *
                       rho(f.forward[std::size_t(i)], f.forward[std::size_t(j)]);
    }
  return out;
}
}  // namespace detail

// V -> U half round: rho' = sum Lambda rho Lambda^T (z then x projection
// averages folded together; see the iterative relations).
inline DensityMatrix half_round_v_to_u(const DensityMatrix& r, const JointSvd& jsvd) {
  require(r.basis.kind == Basis::V, "half_round_v_to_u: basis mismatch");
  return {r.n_atoms, BasisTag::u(), detail::kraus_forward(r.rho, jsvd)};
}

// U -> V half round: rho' = sum Lambda^T rho Lambda.
inline DensityMatrix half_round_u_to_v(const DensityMatrix& r, const JointSvd& jsvd) {
  require(r.basis.kind == Basis::U, "half_round_u_to_v: basis mismatch");
  return {r.n_atoms, BasisTag::v(), detail::kraus_backward(r.rho, jsvd)};
}

// sums to 1, entries clipped at -1e-12
inline Vec clip_distribution(Vec d) {
  for (int i = 0; i < d.size(); ++i) {
    require(d(i) > -1e-12, "distribution entry below -1e-12");
    if (d(i) < 0) d(i) = 0.0;
  }
  const double s = d.sum();
  require(s > 0, "distribution sums to zero");
  return d / s;
}

// Rotate rho0 (z basis) into V, iterate half rounds; one diagonal per
// completed V-basis round, rounds[0] = diag(V^dag rho0 V).
inline std::vector<Vec> run_rounds(const DensityMatrix& rho0, int rounds, const JointSvd& jsvd) {
  require(std::abs(rho0.trace() - 1.0) < 1e-8, "run_rounds: rho0 must have unit trace");
  DensityMatrix cur = to_v_basis(rho0, jsvd);
  std::vector<Vec> out;
  out.push_back(cur.diagonal());
  for (int l = 0; l < rounds; ++l) {
    cur = half_round_u_to_v(half_round_v_to_u(cur, jsvd), jsvd);
    out.push_back(cur.diagonal());
  }
  return out;
}

// A_{mk} = sum over 3-projection rounds (dz, dx, dz') of |A(k)|^2 with
// m = r(k); column-stochastic.
inline Mat build_transition_matrix(const JointSvd& jsvd) {
  const int n = jsvd.n_atoms, dim = jsvd.dim();
  Mat a = Mat::Zero(dim, dim);
  for (int dz1 = 0; dz1 <= n; ++dz1)
    for (int dx = 0; dx <= n; ++dx) {
      const LambdaFactor& f1 = jsvd.factor(dx, dz1);
      for (int dz2 = 0; dz2 <= n; ++dz2) {
        const LambdaFactor& f2 = jsvd.factor(dx, dz2);
        for (int k = 0; k < dim; ++k) {
          const int mid = f1.forward[std::size_t(k)];
          if (mid < 0) continue;
          const int m = f2.inverse[std::size_t(mid)];
          if (m < 0) continue;
          const double c = f1.amp[std::size_t(k)] * f2.amp[std::size_t(m)];
          a(m, k) += c * c;
        }
      }
    }
  return a;
}

struct SteadyStateOptions {
  double tol = 1e-12;
  long max_iters = 100000;
};

// Power iteration d <- A d / |A d|_1 from d0.  Eigenvalue 1 is degenerate;
// the limit depends on d0, matching the mixed-state analysis.
inline Vec steady_state(const Mat& a, Vec d0, SteadyStateOptions opt = {}) {
  Vec d = clip_distribution(std::move(d0));
  for (long it = 0; it < opt.max_iters; ++it) {
    Vec dn = a * d;
    dn /= dn.sum();
    const double delta = (dn - d).cwiseAbs().maxCoeff();
    d = dn;
    if (delta < opt.tol) return d;
  }
  throw std::runtime_error("steady_state: no convergence after " + std::to_string(opt.max_iters) +
                           " iterations; residual " +
                           std::to_string((a * d - d).cwiseAbs().maxCoeff()));
}

// Orthonormal basis of the eigenvalue-1 space of A (analysis mode): right
// singular vectors of A - I with singular value < tol.
inline std::vector<Vec> fixed_point_space(const Mat& a, double tol = 1e-9) {
  const int dim = int(a.rows());
  Eigen::JacobiSVD<Mat> svd(a - Mat::Identity(dim, dim), Eigen::ComputeThinV);
  std::vector<Vec> out;
  for (int i = 0; i < dim; ++i)
    if (svd.singularValues()(i) < tol) out.push_back(svd.matrixV().col(i));
  return out;
}

}  // namespace qnd
