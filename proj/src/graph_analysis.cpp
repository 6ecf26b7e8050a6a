#include "mdplv/graph_analysis.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace mdplv {

namespace {

// Iterative Tarjan over an adjacency list; components come out in reverse
// topological order (cross edges point from higher to lower component index).
std::vector<int> tarjan(const std::vector<std::vector<int>>& adj, int& component_count) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  std::vector<int> low(static_cast<std::size_t>(n), 0);
  std::vector<int> component(static_cast<std::size_t>(n), -1);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  component_count = 0;
  int next_index = 0;

  struct Frame {
    int node;
    std::size_t edge;
  };
  std::vector<Frame> frames;

  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] != -1) continue;
    frames.push_back({root, 0});
    index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = next_index++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = 1;

    while (!frames.empty()) {
      Frame& f = frames.back();
      const auto& edges = adj[static_cast<std::size_t>(f.node)];
      if (f.edge < edges.size()) {
        const int next = edges[f.edge++];
        if (index[static_cast<std::size_t>(next)] == -1) {
          index[static_cast<std::size_t>(next)] = low[static_cast<std::size_t>(next)] = next_index++;
          stack.push_back(next);
          on_stack[static_cast<std::size_t>(next)] = 1;
          frames.push_back({next, 0});
        } else if (on_stack[static_cast<std::size_t>(next)]) {
          low[static_cast<std::size_t>(f.node)] =
              std::min(low[static_cast<std::size_t>(f.node)], index[static_cast<std::size_t>(next)]);
        }
      } else {
        if (low[static_cast<std::size_t>(f.node)] == index[static_cast<std::size_t>(f.node)]) {
          int popped;
          do {
            popped = stack.back();
            stack.pop_back();
            on_stack[static_cast<std::size_t>(popped)] = 0;
            component[static_cast<std::size_t>(popped)] = component_count;
          } while (popped != f.node);
          ++component_count;
        }
        const int done = f.node;
        frames.pop_back();
        if (!frames.empty()) {
          low[static_cast<std::size_t>(frames.back().node)] =
              std::min(low[static_cast<std::size_t>(frames.back().node)], low[static_cast<std::size_t>(done)]);
        }
      }
    }
  }
  return component;
}

std::string join_names(const Mdp& mdp, const std::vector<StateId>& states) {
  std::vector<std::string> names;
  names.reserve(states.size());
  for (StateId s : states) names.push_back(mdp.state_names[static_cast<std::size_t>(s)]);
  std::sort(names.begin(), names.end());
  std::string out = "(";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += "+";
    out += names[i];
  }
  out += ")";
  return out;
}

CollapseResult collapse_impl(const Mdp& mdp, const std::vector<StateId>& ec_states,
                             const std::vector<ActionId>& ec_actions, CollapseMap& map,
                             const std::string& merged_name, int designate, const std::string& log_kind) {
  const StateId n = mdp.state_count();
  std::vector<char> in_r(static_cast<std::size_t>(n), 0);
  for (StateId s : ec_states) {
    if (s < 0 || s >= n) throw UsageError("collapse: state id out of range");
    in_r[static_cast<std::size_t>(s)] = 1;
  }
  std::vector<char> in_b(static_cast<std::size_t>(mdp.action_count()), 0);
  for (ActionId a : ec_actions) {
    if (a < 0 || a >= mdp.action_count()) throw UsageError("collapse: action id out of range");
    if (!in_r[static_cast<std::size_t>(mdp.actions[static_cast<std::size_t>(a)].owner)]) {
      throw UsageError("collapse: action " + mdp.actions[static_cast<std::size_t>(a)].label +
                       " is not enabled within the collapsed states");
    }
    in_b[static_cast<std::size_t>(a)] = 1;
  }
  if (ec_states.empty()) throw UsageError("collapse: empty state set");

  CollapseResult result;
  std::vector<StateId>& state_map = result.state_map;
  state_map.assign(static_cast<std::size_t>(n), kNoState);
  StateId next = 0;
  for (StateId s = 0; s < n; ++s) {
    if (!in_r[static_cast<std::size_t>(s)]) state_map[static_cast<std::size_t>(s)] = next++;
  }
  const StateId merged = next++;
  for (StateId s = 0; s < n; ++s) {
    if (in_r[static_cast<std::size_t>(s)]) state_map[static_cast<std::size_t>(s)] = merged;
  }
  result.merged = merged;

  Mdp out;
  out.state_names.resize(static_cast<std::size_t>(next));
  out.enabled.resize(static_cast<std::size_t>(next));
  out.target.assign(static_cast<std::size_t>(next), false);
  for (StateId s = 0; s < n; ++s) {
    const StateId t = state_map[static_cast<std::size_t>(s)];
    if (t != merged) out.state_names[static_cast<std::size_t>(t)] = mdp.state_names[static_cast<std::size_t>(s)];
    if (mdp.target[static_cast<std::size_t>(s)]) out.target[static_cast<std::size_t>(t)] = true;
  }
  out.state_names[static_cast<std::size_t>(merged)] = merged_name;
  out.initial = state_map[static_cast<std::size_t>(mdp.initial)];
  if (mdp.terminal_one) out.terminal_one = state_map[static_cast<std::size_t>(*mdp.terminal_one)];
  if (mdp.terminal_zero) out.terminal_zero = state_map[static_cast<std::size_t>(*mdp.terminal_zero)];
  if (designate == 1) out.terminal_one = merged;
  if (designate == 0) out.terminal_zero = merged;

  result.action_map.assign(static_cast<std::size_t>(mdp.action_count()), kNoAction);
  for (ActionId a = 0; a < mdp.action_count(); ++a) {
    if (in_b[static_cast<std::size_t>(a)]) continue;
    const Action& act = mdp.actions[static_cast<std::size_t>(a)];
    Action fresh;
    fresh.owner = state_map[static_cast<std::size_t>(act.owner)];
    fresh.label = act.label;
    std::map<StateId, Rational> mass;
    for (const TransitionEntry& e : act.support) mass[state_map[static_cast<std::size_t>(e.target)]] += e.prob;
    for (auto& [to, prob] : mass) {
      TransitionEntry entry;
      entry.target = to;
      entry.prob = prob;
      entry.prob_d = to_double(prob);
      fresh.support.push_back(std::move(entry));
    }
    out.actions.push_back(std::move(fresh));
    const ActionId id = out.action_count() - 1;
    out.enabled[static_cast<std::size_t>(out.actions.back().owner)].push_back(id);
    result.action_map[static_cast<std::size_t>(a)] = id;
  }

  map.apply(state_map, next, log_kind + " " + join_names(mdp, ec_states) + " -> " + merged_name);
  result.mdp = std::move(out);
  return result;
}

}  // namespace

std::vector<int> strongly_connected_components(const Mdp& mdp, int& component_count) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(mdp.state_count()));
  for (const Action& act : mdp.actions) {
    for (const TransitionEntry& e : act.support) adj[static_cast<std::size_t>(act.owner)].push_back(e.target);
  }
  return tarjan(adj, component_count);
}

bool is_end_component(const Mdp& mdp, const std::vector<StateId>& states,
                      const std::vector<ActionId>& actions) {
  if (states.empty() || actions.empty()) return false;
  std::vector<char> in_r(static_cast<std::size_t>(mdp.state_count()), 0);
  for (StateId s : states) in_r[static_cast<std::size_t>(s)] = 1;

  std::vector<std::vector<StateId>> b_edges(static_cast<std::size_t>(mdp.state_count()));
  std::vector<char> has_action(static_cast<std::size_t>(mdp.state_count()), 0);
  for (ActionId a : actions) {
    const Action& act = mdp.actions[static_cast<std::size_t>(a)];
    if (!in_r[static_cast<std::size_t>(act.owner)]) return false;  // B owned within R
    has_action[static_cast<std::size_t>(act.owner)] = 1;
    for (const TransitionEntry& e : act.support) {
      if (!in_r[static_cast<std::size_t>(e.target)]) return false;  // closed
      b_edges[static_cast<std::size_t>(act.owner)].push_back(e.target);
    }
  }
  for (StateId s : states) {
    if (!has_action[static_cast<std::size_t>(s)]) return false;
  }

  // strong connectivity inside R through B-actions
  auto reaches_all = [&](const std::vector<std::vector<StateId>>& edges) {
    std::vector<char> seen(static_cast<std::size_t>(mdp.state_count()), 0);
    std::queue<StateId> queue;
    queue.push(states[0]);
    seen[static_cast<std::size_t>(states[0])] = 1;
    while (!queue.empty()) {
      const StateId s = queue.front();
      queue.pop();
      for (StateId t : edges[static_cast<std::size_t>(s)]) {
        if (!seen[static_cast<std::size_t>(t)]) {
          seen[static_cast<std::size_t>(t)] = 1;
          queue.push(t);
        }
      }
    }
    return std::all_of(states.begin(), states.end(),
                       [&](StateId s) { return seen[static_cast<std::size_t>(s)] != 0; });
  };
  if (!reaches_all(b_edges)) return false;
  std::vector<std::vector<StateId>> reversed(static_cast<std::size_t>(mdp.state_count()));
  for (StateId s = 0; s < mdp.state_count(); ++s) {
    for (StateId t : b_edges[static_cast<std::size_t>(s)]) reversed[static_cast<std::size_t>(t)].push_back(s);
  }
  return reaches_all(reversed);
}

CollapseMap CollapseMap::identity(StateId original_count) {
  CollapseMap map;
  map.members_.resize(static_cast<std::size_t>(original_count));
  map.current_of_.resize(static_cast<std::size_t>(original_count));
  for (StateId s = 0; s < original_count; ++s) {
    map.members_[static_cast<std::size_t>(s)] = {s};
    map.current_of_[static_cast<std::size_t>(s)] = s;
  }
  return map;
}

void CollapseMap::apply(const std::vector<StateId>& state_map, StateId new_count, std::string log_line) {
  std::vector<std::vector<StateId>> next(static_cast<std::size_t>(new_count));
  for (StateId cur = 0; cur < static_cast<StateId>(members_.size()); ++cur) {
    const StateId to = state_map[static_cast<std::size_t>(cur)];
    auto& bucket = next[static_cast<std::size_t>(to)];
    bucket.insert(bucket.end(), members_[static_cast<std::size_t>(cur)].begin(),
                  members_[static_cast<std::size_t>(cur)].end());
  }
  for (auto& bucket : next) std::sort(bucket.begin(), bucket.end());
  members_ = std::move(next);
  for (StateId orig = 0; orig < static_cast<StateId>(current_of_.size()); ++orig) {
    current_of_[static_cast<std::size_t>(orig)] =
        state_map[static_cast<std::size_t>(current_of_[static_cast<std::size_t>(orig)])];
  }
  log_.push_back(std::move(log_line));
}

CollapseResult collapse(const Mdp& mdp, const std::vector<StateId>& states,
                        const std::vector<ActionId>& actions, CollapseMap& map) {
  return collapse_impl(mdp, states, actions, map, join_names(mdp, states), -1, "collapse");
}

CollapseResult make_terminal(const Mdp& mdp, StateId s, int terminal, CollapseMap& map) {
  if (terminal != 0 && terminal != 1) throw UsageError("make_terminal: terminal must be 0 or 1");
  const std::optional<StateId>& dest = terminal == 1 ? mdp.terminal_one : mdp.terminal_zero;
  const std::optional<StateId>& other = terminal == 1 ? mdp.terminal_zero : mdp.terminal_one;
  if (!dest) throw UsageError("make_terminal: the requested terminal is not designated");
  if (other && s == *other) throw UsageError("make_terminal: cannot merge one terminal into the other");
  if (s == *dest) throw UsageError("make_terminal: state is already that terminal");
  if (terminal == 0 && mdp.target[static_cast<std::size_t>(s)]) {
    throw UsageError("make_terminal: cannot merge a target state into terminal zero");
  }
  std::vector<StateId> r = {s, *dest};
  const std::string name = mdp.state_names[static_cast<std::size_t>(*dest)];
  return collapse_impl(mdp, r, mdp.enabled[static_cast<std::size_t>(s)], map, name, terminal,
                       "make_terminal");
}

std::vector<EndComponent> mec_decompose(const Mdp& mdp) {
  const StateId n = mdp.state_count();
  std::vector<EndComponent> result;
  std::vector<std::vector<StateId>> work;
  {
    std::vector<StateId> all(static_cast<std::size_t>(n));
    for (StateId s = 0; s < n; ++s) all[static_cast<std::size_t>(s)] = s;
    work.push_back(std::move(all));
  }
  std::vector<char> in_c(static_cast<std::size_t>(n), 0);

  while (!work.empty()) {
    std::vector<StateId> candidate = std::move(work.back());
    work.pop_back();

    for (StateId s : candidate) in_c[static_cast<std::size_t>(s)] = 1;

    // drop states whose every action leaks out of the candidate, to a fixpoint
    std::vector<ActionId> internal;
    bool changed = true;
    while (changed) {
      changed = false;
      internal.clear();
      std::vector<StateId> kept;
      for (StateId s : candidate) {
        bool has_internal = false;
        for (ActionId a : mdp.enabled[static_cast<std::size_t>(s)]) {
          const Action& act = mdp.actions[static_cast<std::size_t>(a)];
          const bool closed = std::all_of(act.support.begin(), act.support.end(), [&](const TransitionEntry& e) {
            return in_c[static_cast<std::size_t>(e.target)] != 0;
          });
          if (closed) {
            has_internal = true;
            internal.push_back(a);
          }
        }
        if (has_internal) {
          kept.push_back(s);
        } else {
          in_c[static_cast<std::size_t>(s)] = 0;
          changed = true;
        }
      }
      candidate = std::move(kept);
      if (changed) internal.clear();
    }
    if (candidate.empty()) continue;

    // local SCCs over the closed actions
    std::vector<int> local_id(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < candidate.size(); ++i) local_id[static_cast<std::size_t>(candidate[i])] = static_cast<int>(i);
    std::vector<std::vector<int>> adj(candidate.size());
    for (ActionId a : internal) {
      const Action& act = mdp.actions[static_cast<std::size_t>(a)];
      for (const TransitionEntry& e : act.support) {
        adj[static_cast<std::size_t>(local_id[static_cast<std::size_t>(act.owner)])].push_back(
            local_id[static_cast<std::size_t>(e.target)]);
      }
    }
    int components = 0;
    const std::vector<int> comp = tarjan(adj, components);

    if (components == 1) {
      EndComponent ec;
      ec.states = candidate;
      ec.actions = internal;
      std::sort(ec.states.begin(), ec.states.end());
      std::sort(ec.actions.begin(), ec.actions.end());
      for (StateId s : candidate) in_c[static_cast<std::size_t>(s)] = 0;
      result.push_back(std::move(ec));
      continue;
    }

    std::vector<std::vector<StateId>> parts(static_cast<std::size_t>(components));
    for (std::size_t i = 0; i < candidate.size(); ++i) {
      parts[static_cast<std::size_t>(comp[i])].push_back(candidate[i]);
    }
    for (StateId s : candidate) in_c[static_cast<std::size_t>(s)] = 0;
    for (auto& part : parts) work.push_back(std::move(part));
  }

  std::sort(result.begin(), result.end(),
            [](const EndComponent& a, const EndComponent& b) { return a.states[0] < b.states[0]; });
  return result;
}

NormalizeResult normalize(const Mdp& input) {
  NormalizeResult out{input, CollapseMap::identity(input.state_count()), true};
  Mdp& m = out.mdp;

  auto fresh_name = [&](std::string base) {
    while (m.find_state(base) != kNoState) base += "'";
    return base;
  };
  auto append_sink = [&](const std::string& name, bool is_target) {
    m.state_names.push_back(name);
    m.enabled.emplace_back();
    m.target.push_back(is_target);
    const StateId s = m.state_count() - 1;
    Action loop;
    loop.owner = s;
    loop.label = "!loop";
    loop.support.push_back({s, Rational(1), 1.0});
    m.actions.push_back(std::move(loop));
    m.enabled[static_cast<std::size_t>(s)].push_back(m.action_count() - 1);
    out.map.append_fresh();
    return s;
  };

  out.had_targets = input.target_count() > 0;

  if (!m.terminal_one) m.terminal_one = append_sink(fresh_name("#1"), true);
  if (!m.terminal_zero) m.terminal_zero = append_sink(fresh_name("#0"), false);

  // fold every target into terminal one with a single batched collapse
  {
    std::vector<StateId> r;
    std::vector<ActionId> b;
    for (StateId s = 0; s < m.state_count(); ++s) {
      if (m.target[static_cast<std::size_t>(s)] && s != *m.terminal_one) {
        r.push_back(s);
        for (ActionId a : m.enabled[static_cast<std::size_t>(s)]) b.push_back(a);
      }
    }
    if (!r.empty()) {
      r.push_back(*m.terminal_one);
      const std::string name = m.state_names[static_cast<std::size_t>(*m.terminal_one)];
      CollapseResult step = collapse_impl(m, r, b, out.map, name, 1, "make_terminal");
      m = std::move(step.mdp);
    }
  }

  // graph-only zero precomputation: states with no path into the target
  {
    std::vector<std::vector<StateId>> reversed(static_cast<std::size_t>(m.state_count()));
    for (const Action& act : m.actions) {
      for (const TransitionEntry& e : act.support) reversed[static_cast<std::size_t>(e.target)].push_back(act.owner);
    }
    std::vector<char> reaches(static_cast<std::size_t>(m.state_count()), 0);
    std::queue<StateId> queue;
    queue.push(*m.terminal_one);
    reaches[static_cast<std::size_t>(*m.terminal_one)] = 1;
    while (!queue.empty()) {
      const StateId s = queue.front();
      queue.pop();
      for (StateId p : reversed[static_cast<std::size_t>(s)]) {
        if (!reaches[static_cast<std::size_t>(p)]) {
          reaches[static_cast<std::size_t>(p)] = 1;
          queue.push(p);
        }
      }
    }
    std::vector<StateId> r;
    std::vector<ActionId> b;
    for (StateId s = 0; s < m.state_count(); ++s) {
      if (!reaches[static_cast<std::size_t>(s)] && s != *m.terminal_zero) {
        r.push_back(s);
        for (ActionId a : m.enabled[static_cast<std::size_t>(s)]) b.push_back(a);
      }
    }
    if (!r.empty()) {
      r.push_back(*m.terminal_zero);
      const std::string name = m.state_names[static_cast<std::size_t>(*m.terminal_zero)];
      CollapseResult step = collapse_impl(m, r, b, out.map, name, 0, "make_terminal");
      m = std::move(step.mdp);
    }
  }
  return out;
}

RestrictedMdp restricted_mdp(const Mdp& mdp, const std::vector<StateId>& t_states) {
  if (t_states.empty()) throw UsageError("restricted_mdp: T must be non-empty");
  const StateId n = mdp.state_count();
  std::vector<char> in_t(static_cast<std::size_t>(n), 0);
  for (StateId s : t_states) {
    if (s < 0 || s >= n) throw UsageError("restricted_mdp: state id out of range");
    in_t[static_cast<std::size_t>(s)] = 1;
  }
  std::vector<char> in_frontier(static_cast<std::size_t>(n), 0);
  for (StateId s = 0; s < n; ++s) {
    if (!in_t[static_cast<std::size_t>(s)]) continue;
    for (ActionId a : mdp.enabled[static_cast<std::size_t>(s)]) {
      for (const TransitionEntry& e : mdp.actions[static_cast<std::size_t>(a)].support) {
        if (!in_t[static_cast<std::size_t>(e.target)]) in_frontier[static_cast<std::size_t>(e.target)] = 1;
      }
    }
  }

  RestrictedMdp out;
  out.state_map.assign(static_cast<std::size_t>(n), kNoState);
  Mdp& m = out.mdp;
  for (StateId s = 0; s < n; ++s) {
    if (!in_t[static_cast<std::size_t>(s)] && !in_frontier[static_cast<std::size_t>(s)]) continue;
    out.state_map[static_cast<std::size_t>(s)] = static_cast<StateId>(out.state_back.size());
    out.state_back.push_back(s);
    m.state_names.push_back(mdp.state_names[static_cast<std::size_t>(s)]);
    m.enabled.emplace_back();
    m.target.push_back(mdp.target[static_cast<std::size_t>(s)]);
  }

  for (StateId s = 0; s < n; ++s) {
    const StateId local = out.state_map[static_cast<std::size_t>(s)];
    if (local == kNoState) continue;
    if (in_t[static_cast<std::size_t>(s)]) {
      for (ActionId a : mdp.enabled[static_cast<std::size_t>(s)]) {
        const Action& act = mdp.actions[static_cast<std::size_t>(a)];
        Action fresh;
        fresh.owner = local;
        fresh.label = act.label;
        for (const TransitionEntry& e : act.support) {
          fresh.support.push_back({out.state_map[static_cast<std::size_t>(e.target)], e.prob, e.prob_d});
        }
        std::sort(fresh.support.begin(), fresh.support.end(),
                  [](const TransitionEntry& a_, const TransitionEntry& b_) { return a_.target < b_.target; });
        m.actions.push_back(std::move(fresh));
        m.enabled[static_cast<std::size_t>(local)].push_back(m.action_count() - 1);
        out.action_back.push_back(a);
      }
    } else {
      Action stay;
      stay.owner = local;
      stay.label = "!stay";
      stay.support.push_back({local, Rational(1), 1.0});
      m.actions.push_back(std::move(stay));
      m.enabled[static_cast<std::size_t>(local)].push_back(m.action_count() - 1);
      out.action_back.push_back(kNoAction);
    }
  }

  const StateId mapped_initial = out.state_map[static_cast<std::size_t>(mdp.initial)];
  m.initial = mapped_initial != kNoState ? mapped_initial : 0;
  if (mdp.terminal_one && out.state_map[static_cast<std::size_t>(*mdp.terminal_one)] != kNoState) {
    m.terminal_one = out.state_map[static_cast<std::size_t>(*mdp.terminal_one)];
  }
  if (mdp.terminal_zero && out.state_map[static_cast<std::size_t>(*mdp.terminal_zero)] != kNoState) {
    m.terminal_zero = out.state_map[static_cast<std::size_t>(*mdp.terminal_zero)];
  }
  return out;
}

bool rabin_winning_ec(const EndComponent& ec, const RabinCondition& condition) {
  std::set<StateId> r(ec.states.begin(), ec.states.end());
  for (const RabinPair& pair : condition) {
    const bool meets_inf = std::any_of(pair.inf_set.begin(), pair.inf_set.end(),
                                       [&](StateId s) { return r.count(s) > 0; });
    const bool avoids_fin = std::none_of(pair.fin_set.begin(), pair.fin_set.end(),
                                         [&](StateId s) { return r.count(s) > 0; });
    if (meets_inf && avoids_fin) return true;
  }
  return false;
}

}  // namespace mdplv
