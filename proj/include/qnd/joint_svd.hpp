#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "qnd/common.hpp"
#include "qnd/projectors.hpp"
#include "qnd/spin.hpp"
#include "qnd/state.hpp"

namespace qnd {

// ---------------------------------------------------------------------------
// Lemma-1 machinery.  Every two-projector product T_{dz,dx} = P^(x)_dx P^(z)_dz
// shares one pair of orthogonal matrices U, V such that U^T T V is a partial
// permutation with real amplitudes (Lambda).  V is the joint eigenbasis of the
// commuting Gram family R = P^(z) P^(x) P^(z); U is built from the forward
// images T v_k.
// ---------------------------------------------------------------------------

inline constexpr double kLambdaEps = 1e-10;   // amplitude zeroing threshold
inline constexpr double kDiagEps = 1e-9;      // joint-diagonalization residual
inline constexpr int kJointSvdLimit = 40;     // construction size guard

// Partial permutation with amplitudes: column k -> row forward[k] with
// amplitude amp[k]; unmapped entries are -1.
struct LambdaFactor {
  std::vector<std::int32_t> forward;  // by column; -1 absent
  std::vector<double> amp;            // by column; 0 where absent
  std::vector<std::int32_t> inverse;  // by row; -1 absent

  std::optional<std::pair<int, double>> permute_forward(int k) const {
    if (k < 0 || k >= int(forward.size()) || forward[std::size_t(k)] < 0) return std::nullopt;
    return std::make_pair(int(forward[std::size_t(k)]), amp[std::size_t(k)]);
  }
  std::optional<std::pair<int, double>> permute_inverse(int row) const {
    if (row < 0 || row >= int(inverse.size()) || inverse[std::size_t(row)] < 0) return std::nullopt;
    const int k = inverse[std::size_t(row)];
    return std::make_pair(k, amp[std::size_t(k)]);
  }
  Mat dense() const {
    const int d = int(forward.size());
    Mat m = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k)
      if (forward[std::size_t(k)] >= 0) m(forward[std::size_t(k)], k) = amp[std::size_t(k)];
    return m;
  }
  int nonzero_count() const {
    int c = 0;
    for (auto f : forward) c += (f >= 0);
    return c;
  }
};

struct JointSvd {
  int n_atoms = 0;
  Mat u, v;                            // orthogonal, (N+1)^2 square
  std::vector<LambdaFactor> factors;   // indexed dx*(N+1) + dz
  std::vector<int> v_sector;           // z-sector of each V column
  std::vector<int> u_sector;           // x-sector of each U column

  int dim() const { return dim_of(n_atoms); }
  const LambdaFactor& factor(int dx, int dz) const {
    return factors[std::size_t(dx * (n_atoms + 1) + dz)];
  }
};

namespace detail {

// apply P^(x)_dx to a real vector via mode-wise pi/2 rotations and the z mask
inline Vec px_apply_real(int n, int dx, const Mat& u1, const std::vector<bool>& mask, const Vec& x) {
  const int d = n + 1;
  Eigen::Map<const Mat> m(x.data(), d, d);       // column-major: m(k1,k2)
  Mat t = u1.transpose() * m * u1;               // rotate into the x frame
  Vec tv = Eigen::Map<Vec>(t.data(), d * d);
  for (int i = 0; i < d * d; ++i)
    if (!mask[std::size_t(i)]) tv(i) = 0.0;
  Eigen::Map<const Mat> tm(tv.data(), d, d);
  Mat outm = u1 * tm * u1.transpose();
  return Eigen::Map<Vec>(outm.data(), d * d);
}

// the ensemble-swap (k1 <-> k2) commutes with the whole R family and makes
// the joint eigenbasis rigid; restricted to a sector it is the index reversal
inline Mat swap_restricted(int n, const std::vector<int>& idx) {
  const int m = int(idx.size());
  Mat s = Mat::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    const int k1 = k1_of(n, idx[std::size_t(a)]);
    const int k2 = k2_of(n, idx[std::size_t(a)]);
    const int swapped = flat_index(n, k2, k1);
    const auto it = std::find(idx.begin(), idx.end(), swapped);
    s(int(it - idx.begin()), a) = 1.0;
  }
  return s;
}

struct Block {
  Mat basis;                 // sector_size x block_size, orthonormal columns
  std::vector<double> fp;    // eigenvalue fingerprint accumulated so far
};

// split a block by the eigenspaces of the symmetric operator M (restricted)
inline std::vector<Block> split_block(const Block& b, const Mat& m_restricted, double tol) {
  Mat mb = b.basis.transpose() * m_restricted * b.basis;
  mb = 0.5 * (mb + mb.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(mb);
  const Vec& w = es.eigenvalues();
  const Mat cols = b.basis * es.eigenvectors();
  std::vector<Block> out;
  int i = 0;
  while (i < w.size()) {
    int j = i;
    while (j + 1 < w.size() && w(j + 1) - w(i) < tol) ++j;
    Block nb;
    nb.basis = cols.middleCols(i, j - i + 1);
    nb.fp = b.fp;
    double lam = 0.0;
    for (int t = i; t <= j; ++t) lam += w(t);
    nb.fp.push_back(lam / (j - i + 1));
    out.push_back(std::move(nb));
    i = j + 1;
  }
  return out;
}

inline void make_first_nonzero_positive(Eigen::Ref<Vec> v) {
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > kLambdaEps) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

}  // namespace detail

// Deterministic construction.  Per z-sector, the restricted Gram family
// {R_{dz,dx}}_{dx=0..N} is refined sequentially into joint eigenblocks and the
// result is further split by the ensemble swap; for N <= 12 this leaves no
// degenerate blocks, so the basis is unique up to signs.  Columns are ordered
// by sector, then by descending eigenvalue fingerprint (swap-even first on
// ties).  U columns appear in first-appearance order of the forward images
// T v_k, scanning (dz, dx, k) ascending, which matches the N=2 fixtures.
inline JointSvd compute_joint_svd(int n_atoms) {
  require(n_atoms >= 1 && n_atoms <= kJointSvdLimit, "compute_joint_svd: N out of range");
  const int n = n_atoms, d = n + 1, dim = dim_of(n);
  const Mat u1 = x_rotation_matrix(n);
  std::vector<std::vector<bool>> masks;
  for (int dd = 0; dd <= n; ++dd) masks.push_back(projector_mask(n, dd));

  JointSvd out;
  out.n_atoms = n;
  out.u = Mat::Zero(dim, dim);
  out.v = Mat::Zero(dim, dim);
  out.v_sector.resize(std::size_t(dim));
  out.u_sector.assign(std::size_t(dim), -1);

  // ---- V: per-sector joint diagonalization ----
  int col = 0;
  for (int dz = 0; dz <= n; ++dz) {
    std::vector<int> idx;
    for (int i = 0; i < dim; ++i)
      if (masks[std::size_t(dz)][std::size_t(i)]) idx.push_back(i);
    const int m = int(idx.size());

    // restricted R_{dz,dx} for each dx, built column-by-column
    std::vector<Mat> rs(std::size_t(n + 1));
    for (int dx = 0; dx <= n; ++dx) {
      Mat r(m, m);
      for (int a = 0; a < m; ++a) {
        Vec e = Vec::Zero(dim);
        e(idx[std::size_t(a)]) = 1.0;
        Vec w = detail::px_apply_real(n, dx, u1, masks[std::size_t(dx)], e);
        for (int b = 0; b < m; ++b) r(b, a) = w(idx[std::size_t(b)]);
      }
      rs[std::size_t(dx)] = 0.5 * (r + r.transpose());
    }

    std::vector<detail::Block> blocks;
    blocks.push_back({Mat::Identity(m, m), {}});
    for (int dx = 0; dx <= n; ++dx) {
      std::vector<detail::Block> next;
      for (const auto& b : blocks)
        for (auto& nb : detail::split_block(b, rs[std::size_t(dx)], 1e-8)) next.push_back(std::move(nb));
      blocks = std::move(next);
    }
    {  // swap refinement
      const Mat sw = detail::swap_restricted(n, idx);
      std::vector<detail::Block> next;
      for (const auto& b : blocks)
        for (auto& nb : detail::split_block(b, sw, 1e-8)) next.push_back(std::move(nb));
      blocks = std::move(next);
    }

    std::sort(blocks.begin(), blocks.end(), [](const detail::Block& a, const detail::Block& b) {
      for (std::size_t i = 0; i < a.fp.size() && i < b.fp.size(); ++i) {
        if (std::abs(a.fp[i] - b.fp[i]) > 1e-9) return a.fp[i] > b.fp[i];
      }
      return false;
    });

    for (const auto& b : blocks) {
      // the swap refinement leaves 1-dim blocks for all supported N; a wider
      // block would make the gauge ambiguous, so fail loudly
      if (b.basis.cols() != 1)
        throw std::runtime_error("compute_joint_svd: degenerate block survived swap refinement");
      Vec v = b.basis.col(0);
      detail::make_first_nonzero_positive(v);
      for (int a = 0; a < m; ++a) out.v(idx[std::size_t(a)], col) = v(a);
      out.v_sector[std::size_t(col)] = dz;
      ++col;
    }

    // verify the sector family is exactly diagonalized in the chosen basis
    Mat vb(m, int(idx.size()));
    vb = out.v(idx, Eigen::seqN(col - m, m));
    for (int dx = 0; dx <= n; ++dx) {
      Mat dd_ = vb.transpose() * rs[std::size_t(dx)] * vb;
      dd_.diagonal().setZero();
      if (dd_.cwiseAbs().maxCoeff() > kDiagEps)
        throw std::runtime_error("compute_joint_svd: joint diagonalization residual too large");
    }
  }

  // ---- U and Lambda: forward-image scan ----
  out.factors.assign(std::size_t(d * d), LambdaFactor{});
  for (auto& f : out.factors) {
    f.forward.assign(std::size_t(dim), -1);
    f.amp.assign(std::size_t(dim), 0.0);
    f.inverse.assign(std::size_t(dim), -1);
  }
  // U columns grouped by x-sector to keep the overlap scan short
  std::vector<std::vector<int>> u_by_sector(std::size_t(n + 1));
  int n_u = 0;
  for (int dz = 0; dz <= n; ++dz) {
    for (int dx = 0; dx <= n; ++dx) {
      LambdaFactor& f = out.factors[std::size_t(dx * d + dz)];
      for (int k = 0; k < dim; ++k) {
        if (out.v_sector[std::size_t(k)] != dz) continue;  // P^(z) kills other sectors
        Vec img = detail::px_apply_real(n, dx, u1, masks[std::size_t(dx)], out.v.col(k));
        const double a = img.norm();
        if (a <= kLambdaEps) continue;
        img /= a;
        int row = -1;
        double sign = 1.0;
        for (int cand : u_by_sector[std::size_t(dx)]) {
          const double ov = out.u.col(cand).dot(img);
          if (std::abs(ov) > 0.5) {
            if ((img - (ov > 0 ? 1.0 : -1.0) * out.u.col(cand)).norm() > 1e-7)
              throw std::runtime_error("compute_joint_svd: impure image match");
            row = cand;
            sign = ov > 0 ? 1.0 : -1.0;
            break;
          }
          if (std::abs(ov) > 1e-7)
            throw std::runtime_error("compute_joint_svd: partial image overlap");
        }
        if (row < 0) {
          require(n_u < dim, "compute_joint_svd: too many U columns");
          out.u.col(n_u) = img;
          out.u_sector[std::size_t(n_u)] = dx;
          u_by_sector[std::size_t(dx)].push_back(n_u);
          row = n_u;
          ++n_u;
        }
        f.forward[std::size_t(k)] = row;
        f.amp[std::size_t(k)] = sign * a;
        f.inverse[std::size_t(row)] = k;
      }
    }
  }
  if (n_u != dim) throw std::runtime_error("compute_joint_svd: U incomplete");

  // sign normalization on U columns; flip the touched Lambda rows to match
  for (int j = 0; j < dim; ++j) {
    Vec cu = out.u.col(j);
    bool flip = false;
    for (int i = 0; i < dim; ++i) {
      if (std::abs(cu(i)) > kLambdaEps) {
        flip = cu(i) < 0;
        break;
      }
    }
    if (flip) {
      out.u.col(j) = -cu;
      for (auto& f : out.factors) {
        const int k = f.inverse[std::size_t(j)];
        if (k >= 0) f.amp[std::size_t(k)] = -f.amp[std::size_t(k)];
      }
    }
  }
  return out;
}

// R_{dz,dx} = P^(z) P^(x) P^(z), dense (for oracles).
inline Mat gram_matrix(int n_atoms, int dz, int dx, int dense_limit = kDenseLimit) {
  const Mat pz = projector_matrix({n_atoms, dz, BasisTag::z()}, dense_limit);
  const Mat px = projector_matrix({n_atoms, dx, BasisTag::x()}, dense_limit);
  return pz * px * pz;
}

// max commutator over all Gram pairs; Lemma 1 / Appendix A says ~0.
inline double verify_commuting_family(int n_atoms, int dense_limit = kDenseLimit) {
  std::vector<Mat> rs;
  for (int dz = 0; dz <= n_atoms; ++dz)
    for (int dx = 0; dx <= n_atoms; ++dx) rs.push_back(gram_matrix(n_atoms, dz, dx, dense_limit));
  double worst = 0.0;
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = i + 1; j < rs.size(); ++j)
      worst = std::max(worst, (rs[i] * rs[j] - rs[j] * rs[i]).cwiseAbs().maxCoeff());
  return worst;
}

// dense T_{dz,dx} = P^(x) P^(z) (oracle helper)
inline Mat t_matrix(int n_atoms, int dz, int dx, int dense_limit = kDenseLimit) {
  return projector_matrix({n_atoms, dx, BasisTag::x()}, dense_limit) *
         projector_matrix({n_atoms, dz, BasisTag::z()}, dense_limit);
}

}  // namespace qnd
