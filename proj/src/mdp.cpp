#include "mdplv/mdp.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace mdplv {

StateId Mdp::find_state(std::string_view name) const {
  for (StateId s = 0; s < state_count(); ++s) {
    if (state_names[static_cast<std::size_t>(s)] == name) return s;
  }
  return kNoState;
}

std::size_t Mdp::target_count() const {
  std::size_t n = 0;
  for (bool t : target) n += t ? 1 : 0;
  return n;
}

StateId MdpBuilder::state(std::string_view name) {
  StateId existing = mdp_.find_state(name);
  if (existing != kNoState) return existing;
  mdp_.state_names.emplace_back(name);
  mdp_.enabled.emplace_back();
  mdp_.target.push_back(false);
  return mdp_.state_count() - 1;
}

ActionId MdpBuilder::action(std::string_view from, std::string_view label,
                            std::vector<std::pair<std::string, Rational>> transitions) {
  const StateId owner = state(from);
  Action act;
  act.owner = owner;
  act.label = std::string(label);
  for (auto& [name, prob] : transitions) {
    TransitionEntry entry;
    entry.target = state(name);
    entry.prob = std::move(prob);
    entry.prob_d = to_double(entry.prob);
    act.support.push_back(std::move(entry));
  }
  std::sort(act.support.begin(), act.support.end(),
            [](const TransitionEntry& a, const TransitionEntry& b) { return a.target < b.target; });
  mdp_.actions.push_back(std::move(act));
  const ActionId id = mdp_.action_count() - 1;
  mdp_.enabled[static_cast<std::size_t>(owner)].push_back(id);
  return id;
}

void MdpBuilder::initial(std::string_view name) { mdp_.initial = state(name); }

void MdpBuilder::target(std::string_view name) { mdp_.target[static_cast<std::size_t>(state(name))] = true; }

void MdpBuilder::designate_terminal_one(std::string_view name) { mdp_.terminal_one = state(name); }

void MdpBuilder::designate_terminal_zero(std::string_view name) { mdp_.terminal_zero = state(name); }

Mdp MdpBuilder::build() { return std::move(mdp_); }

std::string to_string(const Violation& v) {
  std::string out = v.rule;
  out += " at ";
  out += v.where;
  out += ": ";
  out += v.detail;
  return out;
}

namespace {

std::string pair_name(const Mdp& m, ActionId a) {
  const Action& act = m.actions[static_cast<std::size_t>(a)];
  std::string out = act.owner >= 0 && act.owner < m.state_count()
                        ? m.state_names[static_cast<std::size_t>(act.owner)]
                        : "?";
  out += "/";
  out += act.label;
  return out;
}

void check_terminal(const Mdp& m, StateId s, bool must_be_target, const char* which,
                    std::vector<Violation>& out) {
  const std::string& name = m.state_names[static_cast<std::size_t>(s)];
  const auto& acts = m.enabled[static_cast<std::size_t>(s)];
  bool loop_ok = acts.size() == 1;
  if (loop_ok) {
    const Action& a = m.actions[static_cast<std::size_t>(acts[0])];
    loop_ok = a.support.size() == 1 && a.support[0].target == s && a.support[0].prob == 1;
  }
  if (!loop_ok) {
    out.push_back({"terminal structure", name,
                   std::string(which) + " must have a single self-loop action with probability 1"});
  }
  if (m.target[static_cast<std::size_t>(s)] != must_be_target) {
    out.push_back({"terminal structure", name,
                   std::string(which) + (must_be_target ? " must be a target state" : " must not be a target state")});
  }
}

}  // namespace

std::vector<Violation> validate(const Mdp& m) {
  std::vector<Violation> out;
  const StateId n = m.state_count();

  if (m.initial < 0 || m.initial >= n) {
    out.push_back({"initial state", "model", "initial state id is not a valid state"});
  }
  if (static_cast<StateId>(m.enabled.size()) != n || static_cast<StateId>(m.target.size()) != n) {
    out.push_back({"model shape", "model", "per-state tables do not match the state count"});
    return out;
  }

  std::vector<StateId> owner_seen(m.actions.size(), kNoState);
  for (StateId s = 0; s < n; ++s) {
    const std::string& name = m.state_names[static_cast<std::size_t>(s)];
    const auto& acts = m.enabled[static_cast<std::size_t>(s)];
    if (acts.empty()) {
      out.push_back({"enabled actions", name, "state has no enabled actions"});
    }
    for (ActionId a : acts) {
      if (a < 0 || a >= m.action_count()) {
        out.push_back({"action ownership", name, "enabled list references an unknown action"});
        continue;
      }
      if (owner_seen[static_cast<std::size_t>(a)] != kNoState) {
        out.push_back({"action ownership", pair_name(m, a), "action enabled in more than one state"});
      }
      owner_seen[static_cast<std::size_t>(a)] = s;
      if (m.actions[static_cast<std::size_t>(a)].owner != s) {
        out.push_back({"action ownership", pair_name(m, a), "owner does not match the enabling state"});
      }
    }
  }

  std::set<std::pair<StateId, std::string>> labels;
  for (ActionId a = 0; a < m.action_count(); ++a) {
    const Action& act = m.actions[static_cast<std::size_t>(a)];
    if (owner_seen[static_cast<std::size_t>(a)] == kNoState) {
      out.push_back({"action ownership", pair_name(m, a), "action is not enabled in any state"});
    }
    if (!labels.insert({act.owner, act.label}).second) {
      out.push_back({"action ownership", pair_name(m, a), "duplicate action label on the same state"});
    }

    if (act.support.empty()) {
      out.push_back({"distribution sum", pair_name(m, a), "empty distribution"});
      continue;
    }
    Rational sum = 0;
    StateId prev = kNoState;
    for (const TransitionEntry& e : act.support) {
      if (e.target < 0 || e.target >= n) {
        out.push_back({"distribution target", pair_name(m, a), "transition to an unknown state"});
        continue;
      }
      if (e.target == prev) {
        out.push_back({"distribution target", pair_name(m, a), "duplicate successor in distribution"});
      }
      prev = e.target;
      if (e.prob <= 0 || e.prob > 1) {
        out.push_back({"probability range", pair_name(m, a),
                       "probability " + format_rational(e.prob) + " outside (0,1]"});
      }
      sum += e.prob;
    }
    if (sum != 1) {
      out.push_back({"distribution sum", pair_name(m, a),
                     "probabilities sum to " + format_rational(sum) + ", expected 1"});
    }
  }

  if (m.terminal_one) check_terminal(m, *m.terminal_one, true, "terminal one", out);
  if (m.terminal_zero) check_terminal(m, *m.terminal_zero, false, "terminal zero", out);
  if (m.terminal_one && m.terminal_zero && *m.terminal_one == *m.terminal_zero) {
    out.push_back({"terminal structure", "model", "terminal one and terminal zero coincide"});
  }
  return out;
}

BoundsTable::BoundsTable(const Mdp& mdp) { init(mdp); }

void BoundsTable::init(const Mdp& mdp) {
  mdp_ = &mdp;
  u_.assign(static_cast<std::size_t>(mdp.action_count()), 1.0);
  l_.assign(static_cast<std::size_t>(mdp.action_count()), 0.0);
  if (mdp.terminal_one) {
    for (ActionId a : mdp.enabled[static_cast<std::size_t>(*mdp.terminal_one)]) l_[static_cast<std::size_t>(a)] = 1.0;
  }
  if (mdp.terminal_zero) {
    for (ActionId a : mdp.enabled[static_cast<std::size_t>(*mdp.terminal_zero)]) u_[static_cast<std::size_t>(a)] = 0.0;
  }
  state_u_.assign(static_cast<std::size_t>(mdp.state_count()), 1.0);
  state_l_.assign(static_cast<std::size_t>(mdp.state_count()), 0.0);
  fresh_.assign(static_cast<std::size_t>(mdp.state_count()), 0);
}

void BoundsTable::set_u(ActionId a, double value) {
  u_[static_cast<std::size_t>(a)] = value;
  fresh_[static_cast<std::size_t>(mdp_->actions[static_cast<std::size_t>(a)].owner)] = 0;
}

void BoundsTable::set_l(ActionId a, double value) {
  l_[static_cast<std::size_t>(a)] = value;
  fresh_[static_cast<std::size_t>(mdp_->actions[static_cast<std::size_t>(a)].owner)] = 0;
}

void BoundsTable::refresh(StateId s) const {
  double bu = 0.0, bl = 0.0;
  for (ActionId a : mdp_->enabled[static_cast<std::size_t>(s)]) {
    bu = std::max(bu, u_[static_cast<std::size_t>(a)]);
    bl = std::max(bl, l_[static_cast<std::size_t>(a)]);
  }
  state_u_[static_cast<std::size_t>(s)] = bu;
  state_l_[static_cast<std::size_t>(s)] = bl;
  fresh_[static_cast<std::size_t>(s)] = 1;
}

double BoundsTable::state_u(StateId s) const {
  if (!fresh_[static_cast<std::size_t>(s)]) refresh(s);
  return state_u_[static_cast<std::size_t>(s)];
}

double BoundsTable::state_l(StateId s) const {
  if (!fresh_[static_cast<std::size_t>(s)]) refresh(s);
  return state_l_[static_cast<std::size_t>(s)];
}

void BoundsTable::remap(const Mdp& new_mdp, const std::vector<ActionId>& action_map) {
  std::vector<double> nu(static_cast<std::size_t>(new_mdp.action_count()), 1.0);
  std::vector<double> nl(static_cast<std::size_t>(new_mdp.action_count()), 0.0);
  for (std::size_t old = 0; old < action_map.size(); ++old) {
    const ActionId fresh = action_map[old];
    if (fresh == kNoAction) continue;
    nu[static_cast<std::size_t>(fresh)] = u_[old];
    nl[static_cast<std::size_t>(fresh)] = l_[old];
  }
  mdp_ = &new_mdp;
  u_ = std::move(nu);
  l_ = std::move(nl);
  if (new_mdp.terminal_one) {
    for (ActionId a : new_mdp.enabled[static_cast<std::size_t>(*new_mdp.terminal_one)]) {
      u_[static_cast<std::size_t>(a)] = 1.0;
      l_[static_cast<std::size_t>(a)] = 1.0;
    }
  }
  if (new_mdp.terminal_zero) {
    for (ActionId a : new_mdp.enabled[static_cast<std::size_t>(*new_mdp.terminal_zero)]) {
      u_[static_cast<std::size_t>(a)] = 0.0;
      l_[static_cast<std::size_t>(a)] = 0.0;
    }
  }
  state_u_.assign(static_cast<std::size_t>(new_mdp.state_count()), 1.0);
  state_l_.assign(static_cast<std::size_t>(new_mdp.state_count()), 0.0);
  fresh_.assign(static_cast<std::size_t>(new_mdp.state_count()), 0);
}

double value_of_pair(const ValueVector& v, const Mdp& mdp, StateId s, ActionId a) {
  if (a < 0 || a >= mdp.action_count() || mdp.actions[static_cast<std::size_t>(a)].owner != s) {
    throw UsageError("value_of_pair: action is not enabled in the given state");
  }
  double sum = 0.0;
  for (const TransitionEntry& e : mdp.actions[static_cast<std::size_t>(a)].support) {
    sum += e.prob_d * v[static_cast<std::size_t>(e.target)];
  }
  return sum;
}

Mdp bounded_unfold(const Mdp& mdp, int bound) {
  if (bound < 0) throw UsageError("bounded_unfold: step bound must be non-negative");

  MdpBuilder b;
  const std::string goal = "#1";
  const std::string reject = "#0";

  auto layer_name = [&](StateId s, int k) {
    return mdp.state_names[static_cast<std::size_t>(s)] + "@" + std::to_string(k);
  };
  auto counted = [&](StateId s, int k) -> std::string {
    if (mdp.target[static_cast<std::size_t>(s)]) return goal;
    if (k >= bound) return reject;
    return layer_name(s, k);
  };

  b.state(goal);
  b.state(reject);
  for (int k = 0; k < bound; ++k) {
    for (StateId s = 0; s < mdp.state_count(); ++s) {
      if (mdp.target[static_cast<std::size_t>(s)]) continue;
      const std::string from = layer_name(s, k);
      for (ActionId a : mdp.enabled[static_cast<std::size_t>(s)]) {
        const Action& act = mdp.actions[static_cast<std::size_t>(a)];
        // successors at counter k+1 collapse onto goal/reject, so masses merge
        std::map<std::string, Rational> mass;
        for (const TransitionEntry& e : act.support) mass[counted(e.target, k + 1)] += e.prob;
        std::vector<std::pair<std::string, Rational>> to(mass.begin(), mass.end());
        b.action(from, act.label, std::move(to));
      }
    }
  }
  b.action(goal, "!loop", {{goal, Rational(1)}});
  b.action(reject, "!loop", {{reject, Rational(1)}});
  b.target(goal);
  b.designate_terminal_one(goal);
  b.designate_terminal_zero(reject);
  b.initial(counted(mdp.initial, 0));
  return b.build();
}

}  // namespace mdplv
