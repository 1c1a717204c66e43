#pragma once

#include <random>
#include <vector>

#include "qnd/common.hpp"
#include "qnd/projectors.hpp"
#include "qnd/sequence.hpp"
#include "qnd/state.hpp"

namespace qnd {

// Reference engine for stroboscopic projection sequences: direct projector
// application, one step at a time.  The fast Theorem-1 engine is checked
// against this one.

inline TwoEnsembleState apply_step(const TwoEnsembleState& s, const ProjStep& step) {
  return apply_projector(s, {s.n_atoms(), step.delta, {step.basis}});
}

// T_seq |psi>, chronological order, unnormalized; output stays z-tagged.
inline TwoEnsembleState apply_sequence(const TwoEnsembleState& s, const OutcomeSequence& seq) {
  require(s.basis().kind == Basis::Z, "apply_sequence: state must be in the z basis");
  TwoEnsembleState cur = s;
  for (const auto& step : seq) cur = apply_step(cur, step);
  return cur;
}

inline double sequence_probability(const TwoEnsembleState& s, const OutcomeSequence& seq) {
  require(s.is_normalized(1e-8), "sequence_probability: state must be normalized");
  return apply_sequence(s, seq).norm_sq();
}

struct TrajectoryRecord {
  OutcomeSequence sequence;
  std::vector<TwoEnsembleState> step_states;  // normalized, one per step
  std::vector<double> step_probs;             // conditional probabilities
  double joint_prob = 1.0;
};

// One stochastic run: at each step draw Delta from the conditional
// distribution p(D) = |P_D psi|^2 / |psi|^2 in the step's basis.
// Branches below 1e-14 are excluded from the sampling support.
template <class Rng>
TrajectoryRecord sample_trajectory(const TwoEnsembleState& s0, int total_projections, Rng& rng) {
  require(s0.is_normalized(1e-8), "sample_trajectory: state must be normalized");
  const int n = s0.n_atoms();
  TrajectoryRecord rec;
  TwoEnsembleState cur = s0;
  std::vector<ProjStep> steps;
  for (int step = 0; step < total_projections; ++step) {
    const Basis b = step % 2 == 0 ? Basis::Z : Basis::X;
    std::vector<TwoEnsembleState> branches;
    std::vector<double> probs(std::size_t(n + 1));
    branches.reserve(std::size_t(n + 1));
    double total = 0.0;
    for (int d = 0; d <= n; ++d) {
      branches.push_back(apply_step(cur, {b, d}));
      double p = branches.back().norm_sq();  // conditional prob: cur is normalized
      if (p < 1e-14) p = 0.0;
      probs[std::size_t(d)] = p;
      total += p;
    }
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double r = u01(rng) * total;
    int pick = -1;
    double acc = 0.0;
    for (int d = 0; d <= n; ++d) {
      if (probs[std::size_t(d)] == 0.0) continue;
      acc += probs[std::size_t(d)];
      pick = d;
      if (r <= acc) break;
    }
    require(pick >= 0, "sample_trajectory: empty sampling support");
    steps.push_back({b, pick});
    rec.step_probs.push_back(probs[std::size_t(pick)]);
    rec.joint_prob *= probs[std::size_t(pick)];
    cur = branches[std::size_t(pick)].normalized();
    rec.step_states.push_back(cur);
  }
  rec.sequence = OutcomeSequence(std::move(steps));
  return rec;
}

// p(k1,k2) = |<k1^{(b1)}, k2^{(b2)} | psi>|^2 / <psi|psi>   (Fig. 6 maps)
inline Mat basis_probabilities(const TwoEnsembleState& s, SpinAxis basis1, SpinAxis basis2) {
  require(s.norm_sq() > 0.0, "basis_probabilities: zero-norm state");
  const int n = s.n_atoms(), d = n + 1;
  auto mode_rot = [&](SpinAxis ax) -> MatC {
    switch (ax) {
      case SpinAxis::Z: return MatC::Identity(d, d);
      case SpinAxis::X: return rotation_matrix(n, M_PI / 2, 0.0);
      default: return rotation_matrix(n, M_PI / 2, M_PI / 2);
    }
  };
  const MatC u1 = mode_rot(basis1), u2 = mode_rot(basis2);
  // coefficient matrix <k1^(b1), k2^(b2)|psi> = (u1^dag M u2^*)_{k1 k2}
  const MatC coef = u1.adjoint() * amplitude_matrix(s) * u2.conjugate();
  return coef.cwiseAbs2().real() / s.norm_sq();
}

}  // namespace qnd
