#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mdplv/graph_analysis.hpp"
#include "mdplv/mdp.hpp"
#include "mdplv/rng.hpp"

namespace mdplv {

enum class Heuristic { rtdp_random, max_gap, round_robin };

Heuristic heuristic_from_name(const std::string& name);
std::string heuristic_name(Heuristic h);

struct LearnConfig {
  double epsilon = 1e-6;  // termination precision on the initial state's gap
  double delta = 0.05;    // error tolerance, DQL/ODQL only
  Heuristic heuristic = Heuristic::max_gap;
  std::uint64_t seed = 1;
  std::int64_t episode_cap = 1'000'000;
  std::int64_t step_cap = 1'000'000;  // per episode; hitting it aborts the episode without updates
  std::int64_t snapshot_every = 0;    // updates between snapshot callbacks, 0 = off
};

struct CollapseEvent {
  std::vector<std::string> states;   // names in the model the collapse was applied to
  std::vector<std::string> actions;  // labels of the collapsed action set
  bool ec_verified = false;          // EC predicate on the pre-collapse model (complete info only)
  int made_terminal = -1;            // 0/1 when the merged state was folded into a terminal
};

struct RunReport {
  double lower = 0.0;
  double upper = 1.0;
  bool terminated = false;
  std::int64_t episodes = 0;
  std::int64_t steps = 0;        // explore steps over all episodes
  std::int64_t inner_steps = 0;  // walk steps inside collapsed components (ODQL)
  std::int64_t states_visited = 0;
  std::int64_t states_total = 0;
  std::int64_t collapses = 0;
  std::int64_t suspect_collapses = 0;  // inner walks that hit the cap
  std::uint64_t seed = 0;
  double wallclock_ms = 0.0;
  std::vector<CollapseEvent> collapse_events;

  // delayed-update bookkeeping, zero for BRTDP
  std::int64_t successful_updates_u = 0;
  std::int64_t successful_updates_l = 0;
  std::int64_t attempted_updates_u = 0;
  std::int64_t attempted_updates_l = 0;
  std::int64_t clamped_updates = 0;

  double value() const { return 0.5 * (lower + upper); }
  double gap() const { return upper - lower; }
};

/// Behavioral interface of the Update phase. Implementations may keep
/// per-pair state; on_rebuild is delivered when a collapse renumbers actions.
class UpdateRule {
 public:
  virtual ~UpdateRule() = default;
  virtual void update(BoundsTable& bounds, const Mdp& mdp, StateId s, ActionId a, StateId succ) = 0;
  virtual void on_rebuild(const Mdp& mdp, const std::vector<ActionId>& action_map);
  virtual void fill_stats(RunReport& report) const;
};

/// Mutable state of one complete-information run. Owned by run(); exposed to
/// the EC hook and snapshot observers.
struct Engine {
  Mdp mdp;          // current model snapshot (normalized)
  CollapseMap map;  // provenance onto the model the run started on
  BoundsTable bounds;
  std::vector<std::int32_t> rr_cursor;  // per action, round_robin successor cursor
  std::vector<char> visited;            // over the starting model's states
  std::int64_t visited_count = 0;
  SplitMix64 rng;
  UpdateRule* rule = nullptr;
  RunReport report;

  Engine(const Mdp& start, std::uint64_t seed);

  void mark_visited(StateId current_state);
  /// Swaps in a rebuilt model and remaps bounds, cursors and the rule.
  void adopt(Mdp&& next, const std::vector<ActionId>& action_map);
};

/// Uniform choice among the actions maximising U(s, .).
ActionId select_action(const BoundsTable& bounds, const Mdp& mdp, StateId s, SplitMix64& rng);

/// Successor choice per heuristic: sample the distribution, take the largest
/// U-L gap (ties to the lowest state id), or cycle the support round-robin.
StateId get_succ(const Mdp& mdp, StateId s, ActionId a, const BoundsTable& bounds, Heuristic heuristic,
                 std::vector<std::int32_t>& rr_cursor, SplitMix64& rng);

/// Called after every explore step; returns true when it collapsed something,
/// which aborts the episode and restarts from the (possibly remapped) initial
/// state.
using EcHook = std::function<bool(Engine&, const Path&)>;

using SnapshotObserver = std::function<void(const Engine&)>;

/// The Explore/Update loop: repeatedly samples a path from the initial state
/// to a terminal following the highest upper bound, then updates the bounds
/// backwards along it, until the initial state's gap drops below epsilon or a
/// cap is hit. Requires a normalized model.
RunReport run(const Mdp& normalized, UpdateRule& rule, const LearnConfig& cfg, EcHook ec_hook = {},
              SnapshotObserver snapshot = {});

}  // namespace mdplv
