#pragma once

#include <vector>

#include "qnd/common.hpp"
#include "qnd/joint_svd.hpp"
#include "qnd/projectors.hpp"
#include "qnd/state.hpp"

namespace qnd {

// Characterization of the V-basis states: sector classification, amplitude
// maps and the entanglement spectrum.  U-basis twins are exposed through the
// same calls with from_u = true.

struct VBasisLabel {
  int index;
  int sector;
};

inline int sector_size(int n_atoms, int delta) { return projector_rank(n_atoms, delta); }

inline TwoEnsembleState vbasis_state(const JointSvd& jsvd, int index, bool from_u = false) {
  require(index >= 0 && index < jsvd.dim(), "vbasis_state: index out of range");
  const Mat& b = from_u ? jsvd.u : jsvd.v;
  return {jsvd.n_atoms, b.col(index).cast<cplx>(), BasisTag::z()};
}

// Assign each column the unique Delta with P_D v = v; eigenvector test, not
// support pattern, so tiny off-sector leakage fails loudly.
inline std::vector<VBasisLabel> classify_sectors(const JointSvd& jsvd, bool from_u = false,
                                                 double tol = 1e-8) {
  const int n = jsvd.n_atoms, dim = jsvd.dim();
  std::vector<std::vector<bool>> masks;
  for (int d = 0; d <= n; ++d) masks.push_back(projector_mask(n, d));
  const Mat u1 = x_rotation_matrix(n);
  std::vector<VBasisLabel> out;
  std::vector<int> counts(std::size_t(n + 1), 0);
  for (int j = 0; j < dim; ++j) {
    const Vec col = (from_u ? jsvd.u : jsvd.v).col(j);
    int found = -1;
    for (int d = 0; d <= n; ++d) {
      Vec proj;
      if (from_u) {
        proj = detail::px_apply_real(n, d, u1, masks[std::size_t(d)], col);
      } else {
        proj = col;
        for (int i = 0; i < dim; ++i)
          if (!masks[std::size_t(d)][std::size_t(i)]) proj(i) = 0.0;
      }
      if ((proj - col).cwiseAbs().maxCoeff() < tol) {
        found = d;
        break;
      }
    }
    if (found < 0) throw std::runtime_error("classify_sectors: column is not sector-pure");
    out.push_back({j, found});
    ++counts[std::size_t(found)];
  }
  for (int d = 0; d <= n; ++d)
    if (counts[std::size_t(d)] != sector_size(n, d))
      throw std::runtime_error("classify_sectors: sector size mismatch");
  return out;
}

struct SpectrumEntry {
  int index;
  int sector;
  double entropy_bits;
  double normalized;  // E / log2(N+1)
};

inline std::vector<SpectrumEntry> entanglement_spectrum(const JointSvd& jsvd, bool from_u = false) {
  const double emax = std::log2(double(jsvd.n_atoms + 1));
  const auto labels = classify_sectors(jsvd, from_u);
  std::vector<SpectrumEntry> out;
  out.reserve(labels.size());
  for (const auto& lab : labels) {
    const double e = entanglement_entropy(vbasis_state(jsvd, lab.index, from_u));
    out.push_back({lab.index, lab.sector, e, e / emax});
  }
  return out;
}

}  // namespace qnd
