#include "mdplv/learning.hpp"

#include <algorithm>
#include <chrono>

namespace mdplv {

Heuristic heuristic_from_name(const std::string& name) {
  if (name == "rtdp_random") return Heuristic::rtdp_random;
  if (name == "max_gap") return Heuristic::max_gap;
  if (name == "round_robin") return Heuristic::round_robin;
  throw UsageError("unknown heuristic " + name);
}

std::string heuristic_name(Heuristic h) {
  switch (h) {
    case Heuristic::rtdp_random: return "rtdp_random";
    case Heuristic::max_gap: return "max_gap";
    case Heuristic::round_robin: return "round_robin";
  }
  return "?";
}

void UpdateRule::on_rebuild(const Mdp&, const std::vector<ActionId>&) {}
void UpdateRule::fill_stats(RunReport&) const {}

Engine::Engine(const Mdp& start, std::uint64_t seed)
    : mdp(start),
      map(CollapseMap::identity(start.state_count())),
      bounds(mdp),
      rr_cursor(static_cast<std::size_t>(start.action_count()), 0),
      visited(static_cast<std::size_t>(start.state_count()), 0),
      rng(seed) {}

void Engine::mark_visited(StateId current_state) {
  for (StateId original : map.members(current_state)) {
    char& flag = visited[static_cast<std::size_t>(original)];
    if (!flag) {
      flag = 1;
      ++visited_count;
    }
  }
}

void Engine::adopt(Mdp&& next, const std::vector<ActionId>& action_map) {
  mdp = std::move(next);
  bounds.remap(mdp, action_map);
  rr_cursor.assign(static_cast<std::size_t>(mdp.action_count()), 0);
  if (rule) rule->on_rebuild(mdp, action_map);
}

ActionId select_action(const BoundsTable& bounds, const Mdp& mdp, StateId s, SplitMix64& rng) {
  const auto& acts = mdp.enabled[static_cast<std::size_t>(s)];
  double best = -1.0;
  for (ActionId a : acts) best = std::max(best, bounds.u(a));
  ActionId first = kNoAction;
  std::int32_t ties = 0;
  for (ActionId a : acts) {
    if (bounds.u(a) == best) {
      if (first == kNoAction) first = a;
      ++ties;
    }
  }
  if (ties <= 1) return first;
  std::int64_t pick = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(ties)));
  for (ActionId a : acts) {
    if (bounds.u(a) == best && pick-- == 0) return a;
  }
  return first;
}

StateId get_succ(const Mdp& mdp, StateId, ActionId a, const BoundsTable& bounds, Heuristic heuristic,
                 std::vector<std::int32_t>& rr_cursor, SplitMix64& rng) {
  const auto& support = mdp.actions[static_cast<std::size_t>(a)].support;
  if (support.size() == 1) return support[0].target;
  switch (heuristic) {
    case Heuristic::rtdp_random: {
      const double x = rng.next_double();
      double acc = 0.0;
      for (const TransitionEntry& e : support) {
        acc += e.prob_d;
        if (x < acc) return e.target;
      }
      return support.back().target;
    }
    case Heuristic::max_gap: {
      StateId best = support[0].target;
      double best_gap = bounds.gap(best);
      for (std::size_t i = 1; i < support.size(); ++i) {
        const double g = bounds.gap(support[i].target);
        if (g > best_gap) {
          best_gap = g;
          best = support[i].target;  // support is in ascending id order, ties stay lowest
        }
      }
      return best;
    }
    case Heuristic::round_robin: {
      std::int32_t& cursor = rr_cursor[static_cast<std::size_t>(a)];
      const StateId out = support[static_cast<std::size_t>(cursor)].target;
      cursor = static_cast<std::int32_t>((cursor + 1) % static_cast<std::int32_t>(support.size()));
      return out;
    }
  }
  return support[0].target;
}

RunReport run(const Mdp& normalized, UpdateRule& rule, const LearnConfig& cfg, EcHook ec_hook,
              SnapshotObserver snapshot) {
  const auto t0 = std::chrono::steady_clock::now();
  Engine eng(normalized, cfg.seed);
  eng.rule = &rule;
  eng.report.seed = cfg.seed;
  eng.report.states_total = normalized.state_count();

  Path omega;
  std::int64_t total_updates = 0;

  for (std::int64_t episode = 0; episode < cfg.episode_cap; ++episode) {
    const StateId root = eng.mdp.initial;
    if (eng.bounds.gap(root) < cfg.epsilon) {
      eng.report.terminated = true;
      break;
    }

    omega.start(root);
    eng.mark_visited(root);
    bool aborted = false;
    bool collapsed = false;
    std::int64_t episode_steps = 0;

    for (;;) {
      const StateId s = omega.last();
      if (eng.mdp.is_designated_terminal(s)) break;
      const ActionId a = select_action(eng.bounds, eng.mdp, s, eng.rng);
      const StateId next = get_succ(eng.mdp, s, a, eng.bounds, cfg.heuristic, eng.rr_cursor, eng.rng);
      omega.step(a, next);
      eng.mark_visited(next);
      ++episode_steps;
      ++eng.report.steps;
      if (ec_hook && ec_hook(eng, omega)) {
        collapsed = true;
        break;
      }
      if (eng.mdp.is_designated_terminal(next)) break;
      if (episode_steps >= cfg.step_cap) {
        aborted = true;
        break;
      }
    }
    ++eng.report.episodes;
    if (aborted || collapsed) continue;

    for (std::size_t i = omega.actions.size(); i-- > 0;) {
      rule.update(eng.bounds, eng.mdp, omega.states[i], omega.actions[i], omega.states[i + 1]);
      ++total_updates;
      if (snapshot && cfg.snapshot_every > 0 && total_updates % cfg.snapshot_every == 0) {
        snapshot(eng);
      }
    }
  }

  if (!eng.report.terminated && eng.bounds.gap(eng.mdp.initial) < cfg.epsilon) {
    eng.report.terminated = true;
  }
  eng.report.lower = eng.bounds.state_l(eng.mdp.initial);
  eng.report.upper = eng.bounds.state_u(eng.mdp.initial);
  eng.report.states_visited = eng.visited_count;
  rule.fill_stats(eng.report);
  eng.report.wallclock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return eng.report;
}

}  // namespace mdplv
