#include "mdplv/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mdplv {

namespace {

double bellman_value(const Mdp& m, const ValueVector& v, StateId s) {
  double best = 0.0;
  for (ActionId a : m.enabled[static_cast<std::size_t>(s)]) {
    double sum = 0.0;
    for (const TransitionEntry& e : m.actions[static_cast<std::size_t>(a)].support) {
      sum += e.prob_d * v[static_cast<std::size_t>(e.target)];
    }
    best = std::max(best, sum);
  }
  return best;
}

}  // namespace

ValueVector value_iteration(const Mdp& m, const ViConfig& cfg, ViStart start) {
  if (cfg.tolerance <= 0) throw UsageError("value_iteration: tolerance must be positive");
  const StateId n = m.state_count();

  ValueVector v(static_cast<std::size_t>(n), start == ViStart::zeros ? 0.0 : 1.0);
  if (m.terminal_one) v[static_cast<std::size_t>(*m.terminal_one)] = 1.0;
  if (m.terminal_zero) v[static_cast<std::size_t>(*m.terminal_zero)] = 0.0;
  for (StateId s = 0; s < n; ++s) {
    if (m.target[static_cast<std::size_t>(s)]) v[static_cast<std::size_t>(s)] = 1.0;
  }

  // successors first: sweep states by ascending SCC index
  int components = 0;
  const std::vector<int> comp = strongly_connected_components(m, components);
  std::vector<StateId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](StateId a, StateId b) {
    return comp[static_cast<std::size_t>(a)] < comp[static_cast<std::size_t>(b)];
  });

  auto pinned = [&](StateId s) {
    return m.is_designated_terminal(s) || m.target[static_cast<std::size_t>(s)];
  };

  for (std::int64_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    double change = 0.0;
    for (StateId s : order) {
      if (pinned(s)) continue;
      const double fresh = bellman_value(m, v, s);
      change = std::max(change, std::abs(fresh - v[static_cast<std::size_t>(s)]));
      v[static_cast<std::size_t>(s)] = fresh;
    }
    if (change < cfg.tolerance) {
      double residual = 0.0;
      for (StateId s = 0; s < n; ++s) {
        if (pinned(s)) continue;
        residual = std::max(residual, std::abs(v[static_cast<std::size_t>(s)] - bellman_value(m, v, s)));
      }
      if (residual < cfg.tolerance) return v;
    }
  }
  throw std::runtime_error("value_iteration: sweep limit exceeded before reaching the residual tolerance");
}

std::vector<EndComponent> enumerate_ecs(const Mdp& m) {
  const StateId n = m.state_count();
  if (n > 12) throw UsageError("enumerate_ecs: model too large for exhaustive enumeration (|S| <= 12)");

  std::vector<EndComponent> result;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<StateId> states;
    for (StateId s = 0; s < n; ++s) {
      if (mask & (1u << s)) states.push_back(s);
    }
    std::vector<ActionId> actions;
    for (StateId s : states) {
      for (ActionId a : m.enabled[static_cast<std::size_t>(s)]) {
        const Action& act = m.actions[static_cast<std::size_t>(a)];
        const bool closed = std::all_of(act.support.begin(), act.support.end(), [&](const TransitionEntry& e) {
          return (mask & (1u << e.target)) != 0;
        });
        if (closed) actions.push_back(a);
      }
    }
    if (is_end_component(m, states, actions)) {
      result.push_back({std::move(states), std::move(actions)});
    }
  }
  return result;
}

ExactValues exact_values(const Mdp& input, const ViConfig& cfg) {
  NormalizeResult norm = normalize(input);
  Mdp current = std::move(norm.mdp);
  CollapseMap map = std::move(norm.map);

  std::int64_t collapsed = 0;
  for (;;) {
    std::vector<EndComponent> mecs = mec_decompose(current);
    const EndComponent* pick = nullptr;
    for (const EndComponent& ec : mecs) {
      const bool trivial = ec.states.size() == 1 && current.is_designated_terminal(ec.states[0]);
      if (!trivial) {
        pick = &ec;
        break;
      }
    }
    if (!pick) break;

    CollapseResult step = collapse(current, pick->states, pick->actions, map);
    ++collapsed;
    const StateId merged = step.merged;
    const bool is_target = step.mdp.target[static_cast<std::size_t>(merged)];
    const bool no_actions = step.mdp.enabled[static_cast<std::size_t>(merged)].empty();
    current = std::move(step.mdp);
    if (is_target) {
      current = make_terminal(current, merged, 1, map).mdp;
    } else if (no_actions) {
      current = make_terminal(current, merged, 0, map).mdp;
    }
  }

  const ValueVector v = value_iteration(current, cfg);
  ExactValues out;
  out.states_after_collapse = current.state_count();
  out.collapsed_mecs = collapsed;
  out.values.resize(static_cast<std::size_t>(input.state_count()));
  for (StateId s = 0; s < input.state_count(); ++s) {
    out.values[static_cast<std::size_t>(s)] = v[static_cast<std::size_t>(map.current_of(s))];
  }
  return out;
}

}  // namespace mdplv
