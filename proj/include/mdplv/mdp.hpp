#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mdplv/rational.hpp"

namespace mdplv {

using StateId = std::int32_t;
using ActionId = std::int32_t;

inline constexpr StateId kNoState = -1;
inline constexpr ActionId kNoAction = -1;

// Raised when a caller violates an interface precondition (unknown action,
// wrong terminal, ...). Distinct from model-content errors raised by the
// parser.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TransitionEntry {
  StateId target = kNoState;
  Rational prob;    // exact, in (0,1]
  double prob_d = 0.0;  // cached double conversion of prob
};

// Actions are namespaced per owning state: an action id belongs to exactly
// one state, so a (state, action) pair is identified by the action id alone.
struct Action {
  StateId owner = kNoState;
  std::string label;
  std::vector<TransitionEntry> support;  // sorted by target, targets unique
};

/// Immutable finite MDP with exact rational transition probabilities.
/// States and actions are interned to dense ids; external names live in
/// state_names / Action::label. Instances are safe to share across threads
/// once built.
struct Mdp {
  std::vector<std::string> state_names;
  std::vector<std::vector<ActionId>> enabled;  // per state, ordered, non-empty
  std::vector<Action> actions;
  StateId initial = kNoState;
  std::vector<bool> target;  // membership in F, indexed by state
  std::optional<StateId> terminal_one;   // designated target sink, value 1
  std::optional<StateId> terminal_zero;  // designated reject sink, value 0

  StateId state_count() const { return static_cast<StateId>(state_names.size()); }
  ActionId action_count() const { return static_cast<ActionId>(actions.size()); }

  StateId find_state(std::string_view name) const;

  bool is_designated_terminal(StateId s) const {
    return (terminal_one && *terminal_one == s) || (terminal_zero && *terminal_zero == s);
  }

  std::size_t target_count() const;
};

/// Incremental construction with name interning. build() moves the model out;
/// it does not validate (call validate() on the result).
class MdpBuilder {
 public:
  StateId state(std::string_view name);
  ActionId action(std::string_view from, std::string_view label,
                  std::vector<std::pair<std::string, Rational>> transitions);
  void initial(std::string_view name);
  void target(std::string_view name);
  void designate_terminal_one(std::string_view name);
  void designate_terminal_zero(std::string_view name);
  Mdp build();

 private:
  Mdp mdp_;
};

struct Violation {
  std::string rule;   // "distribution sum", "action ownership", ...
  std::string where;  // state / action the rule failed on
  std::string detail;
};

std::string to_string(const Violation& v);

/// Total structural check; empty result iff the model is well formed.
std::vector<Violation> validate(const Mdp& mdp);

/// Alternating state/action sequence; states.size() == actions.size() + 1
/// for any non-empty path.
struct Path {
  std::vector<StateId> states;
  std::vector<ActionId> actions;

  StateId last() const { return states.back(); }
  std::size_t length() const { return states.size(); }  // number of states

  void start(StateId s) {
    states.assign(1, s);
    actions.clear();
  }
  void step(ActionId a, StateId s) {
    actions.push_back(a);
    states.push_back(s);
  }
};

/// State-indexed value map, entries in [0,1].
using ValueVector = std::vector<double>;

/// Upper/lower bound functions on state-action pairs, with cached per-state
/// maxima. Single-owner mutable: never share one instance across threads.
class BoundsTable {
 public:
  explicit BoundsTable(const Mdp& mdp);

  double u(ActionId a) const { return u_[static_cast<std::size_t>(a)]; }
  double l(ActionId a) const { return l_[static_cast<std::size_t>(a)]; }
  void set_u(ActionId a, double value);
  void set_l(ActionId a, double value);

  // max over enabled actions, per the derived U(s) / L(s) notation
  double state_u(StateId s) const;
  double state_l(StateId s) const;
  double gap(StateId s) const { return state_u(s) - state_l(s); }

  /// Carries bound values across a model rebuild. action_map[old] is the new
  /// id of a surviving action or kNoAction for a removed one.
  void remap(const Mdp& new_mdp, const std::vector<ActionId>& action_map);

  const Mdp& mdp() const { return *mdp_; }

 private:
  void init(const Mdp& mdp);
  void refresh(StateId s) const;

  const Mdp* mdp_;
  std::vector<double> u_, l_;
  mutable std::vector<double> state_u_, state_l_;
  mutable std::vector<std::uint8_t> fresh_;
};

/// V(s,a) = sum over successors of Delta(s,a)(s') * v(s').
double value_of_pair(const ValueVector& v, const Mdp& mdp, StateId s, ActionId a);

/// Step-bounded reachability via counter unfolding: the returned MDP's
/// unbounded value at its initial state equals the b-step value of the input.
/// Counter-expired non-target states and all target hits are merged into two
/// fresh designated terminals, so the result is at most (b+1)*|S| states.
Mdp bounded_unfold(const Mdp& mdp, int bound);

}  // namespace mdplv
