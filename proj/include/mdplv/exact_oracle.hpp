#pragma once

#include <cstdint>

#include "mdplv/graph_analysis.hpp"
#include "mdplv/mdp.hpp"

namespace mdplv {

struct ViConfig {
  double tolerance = 1e-12;        // Bellman residual bound
  std::int64_t max_sweeps = 10'000'000;
};

enum class ViStart { zeros, ones };

/// Gauss-Seidel value iteration in reverse topological sweep order.
/// Precondition: the model is normalized and contains no end components
/// besides the two designated terminals, so the Bellman fixpoint is unique
/// and either start converges to it. Throws on sweep exhaustion.
ValueVector value_iteration(const Mdp& mdp, const ViConfig& cfg = {}, ViStart start = ViStart::zeros);

/// Every end component of a small model (|S| <= 12), one per supporting
/// state set: the returned pair carries the B-maximal action set, and every
/// other EC on the same states is a sub-pair of it.
std::vector<EndComponent> enumerate_ecs(const Mdp& mdp);

struct ExactValues {
  ValueVector values;  // indexed by the *input* model's states
  StateId states_after_collapse = 0;
  std::int64_t collapsed_mecs = 0;
};

/// Ground-truth pipeline: normalize, collapse every nontrivial MEC, run
/// value iteration, and pull the values back onto the input state space.
ExactValues exact_values(const Mdp& mdp, const ViConfig& cfg = {});

}  // namespace mdplv
