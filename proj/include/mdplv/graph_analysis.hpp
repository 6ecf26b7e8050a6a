#pragma once

#include <string>
#include <vector>

#include "mdplv/mdp.hpp"

namespace mdplv {

/// A pair (R, B): states plus a closed, internally connecting action set.
/// Convention: every state in R carries at least one B-action, so bare
/// singletons without a self-sustaining action do not count as ECs.
struct EndComponent {
  std::vector<StateId> states;   // sorted
  std::vector<ActionId> actions;  // sorted
};

/// Checks the EC definition directly: B is owned within R, closed (no
/// transition leaves R), every state has a B-action, and R is strongly
/// connected through B-actions.
bool is_end_component(const Mdp& mdp, const std::vector<StateId>& states,
                      const std::vector<ActionId>& actions);

/// Provenance of merged states: members[current] lists the ids of the
/// original model (the one the map was created on) represented by a current
/// state. Composes across successive collapses.
class CollapseMap {
 public:
  static CollapseMap identity(StateId original_count);

  const std::vector<StateId>& members(StateId current) const {
    return members_[static_cast<std::size_t>(current)];
  }
  StateId current_of(StateId original) const { return current_of_[static_cast<std::size_t>(original)]; }
  StateId current_count() const { return static_cast<StateId>(members_.size()); }
  StateId original_count() const { return static_cast<StateId>(current_of_.size()); }

  /// Composes with a collapse step; state_map[old_current] = new id.
  void apply(const std::vector<StateId>& state_map, StateId new_count, std::string log_line);

  /// Registers a state appended to the current model that represents no
  /// original state (the normalization terminals).
  void append_fresh() { members_.emplace_back(); }

  const std::vector<std::string>& log() const { return log_; }

 private:
  std::vector<std::vector<StateId>> members_;
  std::vector<StateId> current_of_;
  std::vector<std::string> log_;
};

/// Result of a structural rebuild: the new model plus id translations.
/// state_map is total; action_map sends removed actions to kNoAction.
struct CollapseResult {
  Mdp mdp;
  std::vector<StateId> state_map;
  std::vector<ActionId> action_map;
  StateId merged = kNoState;  // id of s_(R,B) in the new model
};

/// Merges (R, B) into a single state: B disappears, the union of the other
/// R-actions moves to the merged state, and all probability mass into R is
/// rerouted onto it. Requires B to be owned within R.
CollapseResult collapse(const Mdp& mdp, const std::vector<StateId>& states,
                        const std::vector<ActionId>& actions, CollapseMap& map);

/// Collapse({s, t}, E(s)) with the merged state keeping t's identity; every
/// transition into s afterwards leads to the terminal t.
CollapseResult make_terminal(const Mdp& mdp, StateId s, int terminal, CollapseMap& map);

/// Maximal end components via the classical SCC-pruning fixpoint. Disjoint,
/// and every EC of the model is contained in one of them.
std::vector<EndComponent> mec_decompose(const Mdp& mdp);

struct NormalizeResult {
  Mdp mdp;
  CollapseMap map;
  bool had_targets = true;
};

/// Introduces designated terminals, merges all targets into terminal one and
/// all states with no path to a target into terminal zero; afterwards
/// F = {terminal one}.
NormalizeResult normalize(const Mdp& mdp);

/// Auxiliary MDP over T plus its one-step frontier; frontier states keep only
/// a fresh probability-1 self-loop. state_map translates original ids into
/// the restricted model (kNoState when absent), action_map the reverse for
/// retained actions.
struct RestrictedMdp {
  Mdp mdp;
  std::vector<StateId> state_map;            // original -> restricted
  std::vector<StateId> state_back;           // restricted -> original
  std::vector<ActionId> action_back;         // restricted action -> original (kNoAction for self-loops)
};

RestrictedMdp restricted_mdp(const Mdp& mdp, const std::vector<StateId>& t_states);

struct RabinPair {
  std::vector<StateId> inf_set;  // M_i: must intersect R
  std::vector<StateId> fin_set;  // N_i: must avoid R
};

using RabinCondition = std::vector<RabinPair>;

/// True iff some pair i has R meeting M_i and avoiding N_i.
bool rabin_winning_ec(const EndComponent& ec, const RabinCondition& condition);

/// Strongly connected components of the full transition graph; returns the
/// component index per state. Components are numbered in reverse topological
/// order: cross edges always point from a higher index to a lower one.
std::vector<int> strongly_connected_components(const Mdp& mdp, int& component_count);

}  // namespace mdplv
