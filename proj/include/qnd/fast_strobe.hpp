#pragma once

#include <optional>
#include <vector>

#include "qnd/common.hpp"
#include "qnd/joint_svd.hpp"
#include "qnd/sequence.hpp"
#include "qnd/state.hpp"
#include "qnd/strobe.hpp"

namespace qnd {

// Theorem-1 engine: a projection sequence acts on each V-basis index as an
// O(L) chain of partial-permutation lookups with an accumulated amplitude,
// instead of dense matrix products.

struct RecursionResult {
  int final_index = -1;          // r(k); -1 when the chain hit an unmapped index
  double coefficient = 0.0;      // A(k); 0 on an unmapped step
  std::vector<std::pair<int, int>> trace;  // optional (k_l, k_l') per round
};

// Odd 2L+1: forward pi_{x_l z_l} then inverse pi_{x_l z_{l+1}}, l = 1..L.
// Even 2L: same for l = 1..L-1, then one final forward pi_{x_L z_L}.
// Sequences shorter than 3 (odd) / 2 (even) are outside Theorem 1 (L >= 1).
inline RecursionResult recurse(const JointSvd& jsvd, int k, const OutcomeSequence& seq,
                               bool record_trace = false) {
  require(seq.size() >= 2, "recurse: Theorem 1 needs L >= 1 (at least one z,x pair)");
  const int rounds = seq.rounds();
  const bool odd = seq.odd();
  RecursionResult res;
  int cur = k;
  double coeff = 1.0;
  const int pair_rounds = odd ? rounds : rounds - 1;
  for (int l = 1; l <= pair_rounds; ++l) {
    const auto fwd = jsvd.factor(seq.delta_x(l), seq.delta_z(l)).permute_forward(cur);
    if (!fwd) return res;
    const auto inv = jsvd.factor(seq.delta_x(l), seq.delta_z(l + 1)).permute_inverse(fwd->first);
    if (!inv) return res;
    if (record_trace) res.trace.emplace_back(fwd->first, inv->first);
    coeff *= fwd->second * inv->second;
    cur = inv->first;
  }
  if (!odd) {
    const int l = rounds;
    const auto fwd = jsvd.factor(seq.delta_x(l), seq.delta_z(l)).permute_forward(cur);
    if (!fwd) return res;
    coeff *= fwd->second;
    cur = fwd->first;
  }
  res.final_index = cur;
  res.coefficient = coeff;
  return res;
}

namespace detail {
inline VecC to_v_amps(const TwoEnsembleState& s, const JointSvd& jsvd) {
  switch (s.basis().kind) {
    case Basis::V: return s.amps();
    case Basis::Z: return jsvd.v.transpose().cast<cplx>() * s.amps();
    case Basis::U: return jsvd.v.transpose().cast<cplx>() * (jsvd.u.cast<cplx>() * s.amps());
    default:
      throw std::domain_error("fast_strobe: state basis must be Z, V or U");
  }
}
}  // namespace detail

// T_seq |phi>, unnormalized, expressed in the V basis (odd length) or the
// U basis (even length).  O((N+1)^2 L) after the V^T phi conversion.
inline TwoEnsembleState fast_apply_sequence(const TwoEnsembleState& s, const OutcomeSequence& seq,
                                            const JointSvd& jsvd) {
  require(s.n_atoms() == jsvd.n_atoms, "fast_apply_sequence: size mismatch");
  const int dim = jsvd.dim();
  const VecC phi_v = detail::to_v_amps(s, jsvd);
  if (seq.empty()) return {s.n_atoms(), phi_v, BasisTag::v()};
  if (seq.size() == 1) {
    // base case below Theorem 1: P^(z)_D is diagonal in the V basis because
    // every V column is sector-pure
    VecC outa = VecC::Zero(dim);
    for (int k = 0; k < dim; ++k)
      if (jsvd.v_sector[std::size_t(k)] == seq[0].delta) outa(k) = phi_v(k);
    return {s.n_atoms(), std::move(outa), BasisTag::v()};
  }
  VecC outa = VecC::Zero(dim);
  for (int k = 0; k < dim; ++k) {
    if (phi_v(k) == cplx(0.0)) continue;
    const RecursionResult r = recurse(jsvd, k, seq);
    if (r.final_index >= 0) outa(r.final_index) += r.coefficient * phi_v(k);
  }
  return {s.n_atoms(), std::move(outa), seq.odd() ? BasisTag::v() : BasisTag::u()};
}

inline double fast_sequence_probability(const TwoEnsembleState& s, const OutcomeSequence& seq,
                                        const JointSvd& jsvd) {
  require(s.is_normalized(1e-8), "fast_sequence_probability: state must be normalized");
  return fast_apply_sequence(s, seq, jsvd).norm_sq();
}

// explicit O((N+1)^4) conversion back to the z basis
inline TwoEnsembleState to_z_basis(const TwoEnsembleState& s, const JointSvd& jsvd) {
  switch (s.basis().kind) {
    case Basis::Z: return s;
    case Basis::V: return {s.n_atoms(), jsvd.v.cast<cplx>() * s.amps(), BasisTag::z()};
    case Basis::U: return {s.n_atoms(), jsvd.u.cast<cplx>() * s.amps(), BasisTag::z()};
    default: throw std::domain_error("to_z_basis: unsupported basis");
  }
}

}  // namespace qnd
