#pragma once

#include <initializer_list>
#include <vector>

#include "qnd/common.hpp"
#include "qnd/state.hpp"

namespace qnd {

struct ProjStep {
  Basis basis;  // Z or X
  int delta;
};

// Ordered projection outcomes; bases strictly alternate starting with z.
// Entry 0 is applied first (the paper's rightmost projector).
class OutcomeSequence {
 public:
  OutcomeSequence() = default;

  explicit OutcomeSequence(std::vector<ProjStep> steps) : steps_(std::move(steps)) {
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      const Basis expect = i % 2 == 0 ? Basis::Z : Basis::X;
      if (steps_[i].basis != expect)
        throw std::invalid_argument("OutcomeSequence: bases must alternate z,x,z,...");
      require(steps_[i].delta >= 0, "OutcomeSequence: delta must be >= 0");
    }
  }

  // z,x,z,... bases implied by position
  static OutcomeSequence alternating(const std::vector<int>& deltas) {
    std::vector<ProjStep> st;
    st.reserve(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i)
      st.push_back({i % 2 == 0 ? Basis::Z : Basis::X, deltas[i]});
    return OutcomeSequence(std::move(st));
  }

  static OutcomeSequence all_zero(int total_projections) {
    return alternating(std::vector<int>(std::size_t(total_projections), 0));
  }

  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  bool odd() const { return size() % 2 == 1; }
  // L: number of complete (z,x) pairs; size = 2L (even) or 2L+1 (odd)
  int rounds() const { return int(size()) / 2; }
  const ProjStep& operator[](std::size_t i) const { return steps_[i]; }
  auto begin() const { return steps_.begin(); }
  auto end() const { return steps_.end(); }

  // delta of the l-th z projection (l = 1..L+1) / x projection (l = 1..L)
  int delta_z(int l) const { return steps_[std::size_t(2 * (l - 1))].delta; }
  int delta_x(int l) const { return steps_[std::size_t(2 * l - 1)].delta; }

 private:
  std::vector<ProjStep> steps_;
};

}  // namespace qnd
