#include "mdplv/model_io.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mdplv/rng.hpp"

namespace mdplv {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

const json& require_key(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("missing key ") + key);
  return doc.at(key);
}

std::string require_string(const json& node, const char* what) {
  if (!node.is_string()) throw ParseError(std::string(what) + " must be a string");
  return node.get<std::string>();
}

}  // namespace

Mdp parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte > 0 ? static_cast<std::size_t>(e.byte) - 1 : 0);
    throw ParseError("syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + e.what(),
                     line, column);
  }
  if (!doc.is_object()) throw ParseError("top level must be an object");

  const json& states = require_key(doc, "states");
  const json& initial = require_key(doc, "initial");
  const json& targets = require_key(doc, "targets");
  const json& actions = require_key(doc, "actions");
  if (!states.is_array() || states.empty()) throw ParseError("states must be a non-empty array");
  if (!targets.is_array()) throw ParseError("targets must be an array");
  if (!actions.is_array()) throw ParseError("actions must be an array");

  MdpBuilder builder;
  std::set<std::string> seen;
  for (const json& s : states) {
    const std::string name = require_string(s, "state name");
    if (!seen.insert(name).second) throw ParseError("duplicate state " + name);
    builder.state(name);
  }
  auto known = [&](const std::string& name, const char* where) {
    if (!seen.count(name)) throw ParseError(std::string("unknown state ") + name + " in " + where);
  };

  const std::string init_name = require_string(initial, "initial");
  known(init_name, "initial");
  builder.initial(init_name);

  for (const json& t : targets) {
    const std::string name = require_string(t, "target");
    known(name, "targets");
    builder.target(name);
  }

  for (const json& a : actions) {
    if (!a.is_object()) throw ParseError("each action must be an object");
    const std::string from = require_string(require_key(a, "from"), "action from");
    const std::string label = require_string(require_key(a, "label"), "action label");
    known(from, "action " + label);
    const json& to = require_key(a, "to");
    if (!to.is_array() || to.empty()) {
      throw ParseError("action " + from + "/" + label + " must have a non-empty to array");
    }
    std::vector<std::pair<std::string, Rational>> transitions;
    for (const json& edge : to) {
      if (!edge.is_array() || edge.size() != 2) {
        throw ParseError("action " + from + "/" + label + ": each transition must be [state, probability]");
      }
      const std::string target = require_string(edge.at(0), "transition state");
      known(target, "action " + label);
      const std::string prob_text = require_string(edge.at(1), "transition probability");
      auto prob = parse_rational(prob_text);
      if (!prob) {
        throw ParseError("action " + from + "/" + label + ": bad rational \"" + prob_text + "\"");
      }
      transitions.emplace_back(target, std::move(*prob));
    }
    builder.action(from, label, std::move(transitions));
  }

  Mdp mdp = builder.build();
  const std::vector<Violation> violations = validate(mdp);
  if (!violations.empty()) {
    std::string message = "invalid model:";
    for (const Violation& v : violations) {
      message += "\n  ";
      message += to_string(v);
    }
    throw ParseError(std::move(message));
  }
  return mdp;
}

std::string write_model(const Mdp& mdp) {
  std::vector<StateId> order(static_cast<std::size_t>(mdp.state_count()));
  for (StateId s = 0; s < mdp.state_count(); ++s) order[static_cast<std::size_t>(s)] = s;
  std::sort(order.begin(), order.end(), [&](StateId a, StateId b) {
    return mdp.state_names[static_cast<std::size_t>(a)] < mdp.state_names[static_cast<std::size_t>(b)];
  });

  ordered_json doc;
  auto& states = doc["states"] = ordered_json::array();
  for (StateId s : order) states.push_back(mdp.state_names[static_cast<std::size_t>(s)]);
  doc["initial"] = mdp.state_names[static_cast<std::size_t>(mdp.initial)];

  std::vector<std::string> target_names;
  for (StateId s = 0; s < mdp.state_count(); ++s) {
    if (mdp.target[static_cast<std::size_t>(s)]) target_names.push_back(mdp.state_names[static_cast<std::size_t>(s)]);
  }
  std::sort(target_names.begin(), target_names.end());
  doc["targets"] = target_names;

  std::vector<ActionId> action_order(static_cast<std::size_t>(mdp.action_count()));
  for (ActionId a = 0; a < mdp.action_count(); ++a) action_order[static_cast<std::size_t>(a)] = a;
  std::sort(action_order.begin(), action_order.end(), [&](ActionId a, ActionId b) {
    const Action& x = mdp.actions[static_cast<std::size_t>(a)];
    const Action& y = mdp.actions[static_cast<std::size_t>(b)];
    const std::string& xn = mdp.state_names[static_cast<std::size_t>(x.owner)];
    const std::string& yn = mdp.state_names[static_cast<std::size_t>(y.owner)];
    return std::tie(xn, x.label) < std::tie(yn, y.label);
  });

  auto& actions = doc["actions"] = ordered_json::array();
  for (ActionId a : action_order) {
    const Action& act = mdp.actions[static_cast<std::size_t>(a)];
    ordered_json entry;
    entry["from"] = mdp.state_names[static_cast<std::size_t>(act.owner)];
    entry["label"] = act.label;
    std::vector<std::pair<std::string, std::string>> edges;
    for (const TransitionEntry& e : act.support) {
      edges.emplace_back(mdp.state_names[static_cast<std::size_t>(e.target)], format_rational(e.prob));
    }
    std::sort(edges.begin(), edges.end());
    auto& to = entry["to"] = ordered_json::array();
    for (auto& [state, prob] : edges) to.push_back(ordered_json::array({state, prob}));
    actions.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

namespace {

std::string padded(std::string_view prefix, std::int64_t index, int width) {
  std::string digits = std::to_string(index);
  std::string out(prefix);
  out.append(static_cast<std::size_t>(std::max(0, width - static_cast<int>(digits.size()))), '0');
  out += digits;
  return out;
}

GeneratedModel generate_fig1() {
  MdpBuilder b;
  b.state("m1");
  b.state("m2");
  b.state("1");
  b.state("0");
  b.initial("m1");
  b.target("1");
  b.action("m1", "a", {{"m2", Rational(1)}});
  b.action("m2", "b", {{"m1", Rational(1)}});
  b.action("m2", "c", {{"1", Rational(1, 2)}, {"0", Rational(1, 2)}});
  b.action("1", "d", {{"1", Rational(1)}});
  b.action("0", "e", {{"0", Rational(1)}});
  GeneratedModel out{b.build(), {}};
  out.meta["family"] = "fig1";
  out.meta["value"] = "1/2";
  out.meta["ec_states"] = {"m1", "m2"};
  out.meta["ec_actions"] = {"a", "b"};
  return out;
}

GeneratedModel generate_chain(std::int64_t n) {
  MdpBuilder b;
  const int width = static_cast<int>(std::to_string(n).size());
  for (std::int64_t i = 0; i < n; ++i) {
    const std::string from = padded("c", i, width);
    const std::string to = i + 1 < n ? padded("c", i + 1, width) : "goal";
    b.action(from, "f", {{to, Rational(1)}});
  }
  b.action("goal", "!loop", {{"goal", Rational(1)}});
  b.initial(padded("c", 0, width));
  b.target("goal");
  GeneratedModel out{b.build(), {}};
  out.meta["family"] = "chain";
  out.meta["value"] = "1";
  return out;
}

GeneratedModel generate_grid(std::int64_t side) {
  if (side < 2) throw UsageError("generate: grid size must be at least 2");
  MdpBuilder b;
  const int width = static_cast<int>(std::to_string(side - 1).size());
  auto cell = [&](std::int64_t x, std::int64_t y) {
    return padded("g", x, width) + "_" + padded("", y, width);
  };
  for (std::int64_t x = 0; x < side; ++x) {
    for (std::int64_t y = 0; y < side; ++y) {
      const std::string from = cell(x, y);
      if (x == side - 1 && y == side - 1) {
        b.action(from, "!loop", {{from, Rational(1)}});
        continue;
      }
      if (x + 1 < side) {
        b.action(from, "r", {{cell(x + 1, y), Rational(3, 4)}, {from, Rational(1, 8)}, {"sink", Rational(1, 8)}});
      }
      if (y + 1 < side) {
        b.action(from, "u", {{cell(x, y + 1), Rational(3, 4)}, {from, Rational(1, 8)}, {"sink", Rational(1, 8)}});
      }
    }
  }
  b.action("sink", "!loop", {{"sink", Rational(1)}});
  b.initial(cell(0, 0));
  b.target(cell(side - 1, side - 1));
  GeneratedModel out{b.build(), {}};
  out.meta["family"] = "grid";
  out.meta["side"] = side;
  return out;
}

void random_layer_actions(MdpBuilder& b, SplitMix64& rng, const std::vector<std::string>& names,
                          std::size_t from_index) {
  const std::string& from = names[from_index];
  const std::int64_t action_count = 1 + static_cast<std::int64_t>(rng.next_below(3));
  for (std::int64_t k = 0; k < action_count; ++k) {
    // candidate successors: strictly later interior states plus the terminals
    std::vector<std::string> pool;
    for (std::size_t j = from_index + 1; j + 2 < names.size(); ++j) pool.push_back(names[j]);
    pool.push_back("goal");
    pool.push_back("sink");
    const std::size_t succ_count = 1 + rng.next_below(std::min<std::uint64_t>(3, pool.size()));
    std::vector<std::string> chosen;
    for (std::size_t j = 0; j < succ_count; ++j) {
      const std::size_t pick = rng.next_below(pool.size());
      chosen.push_back(pool[pick]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    std::vector<std::int64_t> weights(chosen.size());
    std::int64_t total = 0;
    for (auto& w : weights) {
      w = 1 + static_cast<std::int64_t>(rng.next_below(4));
      total += w;
    }
    std::vector<std::pair<std::string, Rational>> transitions;
    for (std::size_t j = 0; j < chosen.size(); ++j) {
      transitions.emplace_back(chosen[j], Rational(weights[j], total));
    }
    b.action(from, padded("a", k, 1), std::move(transitions));
  }
}

GeneratedModel generate_random_ecfree(std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw UsageError("generate: random_ecfree size must be positive");
  SplitMix64 rng(seed ^ 0x8c9f3b1a5d2e4f60ULL);
  MdpBuilder b;
  const int width = static_cast<int>(std::to_string(n).size());
  std::vector<std::string> names;
  for (std::int64_t i = 0; i < n; ++i) names.push_back(padded("s", i, width));
  names.push_back("goal");
  names.push_back("sink");
  for (const std::string& name : names) b.state(name);
  for (std::size_t i = 0; i + 2 < names.size(); ++i) random_layer_actions(b, rng, names, i);
  b.action("goal", "!loop", {{"goal", Rational(1)}});
  b.action("sink", "!loop", {{"sink", Rational(1)}});
  b.initial(names[0]);
  b.target("goal");
  GeneratedModel out{b.build(), {}};
  out.meta["family"] = "random_ecfree";
  out.meta["n"] = n;
  out.meta["seed"] = seed;
  return out;
}

GeneratedModel generate_random_ec(std::int64_t n, std::uint64_t seed) {
  if (n < 2) throw UsageError("generate: random_ec size must be at least 2");
  GeneratedModel base = generate_random_ecfree(n, seed ^ 0x51ed270693a3d6a2ULL);
  SplitMix64 rng(seed ^ 0xd3f8a11b294c77e5ULL);

  // plant a cycle over a few interior states; their original actions stay as exits
  const std::int64_t k = 2 + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(std::min<std::int64_t>(4, n - 1))));
  std::vector<StateId> pool;
  for (StateId s = 0; s < base.mdp.state_count(); ++s) {
    const std::string& name = base.mdp.state_names[static_cast<std::size_t>(s)];
    if (name != "goal" && name != "sink") pool.push_back(s);
  }
  std::vector<std::string> members;
  for (std::int64_t j = 0; j < k && !pool.empty(); ++j) {
    const std::size_t pick = rng.next_below(pool.size());
    members.push_back(base.mdp.state_names[static_cast<std::size_t>(pool[pick])]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  std::sort(members.begin(), members.end());

  MdpBuilder b;
  for (const std::string& name : base.mdp.state_names) b.state(name);
  for (const Action& act : base.mdp.actions) {
    std::vector<std::pair<std::string, Rational>> transitions;
    for (const TransitionEntry& e : act.support) {
      transitions.emplace_back(base.mdp.state_names[static_cast<std::size_t>(e.target)], e.prob);
    }
    b.action(base.mdp.state_names[static_cast<std::size_t>(act.owner)], act.label, std::move(transitions));
  }
  std::vector<std::string> planted_actions;
  for (std::size_t j = 0; j < members.size(); ++j) {
    const std::string label = padded("ec", static_cast<std::int64_t>(j), 1);
    b.action(members[j], label, {{members[(j + 1) % members.size()], Rational(1)}});
    planted_actions.push_back(label);
  }
  b.initial(base.mdp.state_names[static_cast<std::size_t>(base.mdp.initial)]);
  b.target("goal");

  GeneratedModel out{b.build(), {}};
  out.meta["family"] = "random_ec";
  out.meta["n"] = n;
  out.meta["seed"] = seed;
  out.meta["planted_states"] = members;
  out.meta["planted_actions"] = planted_actions;
  return out;
}

GeneratedModel generate_deadzone(std::int64_t n, std::uint64_t seed) {
  if (n < 16) throw UsageError("generate: deadzone size must be at least 16");
  MdpBuilder b;
  const std::int64_t tree_size = n - 4;  // root, good, goal, sink
  const int width = static_cast<int>(std::to_string(tree_size).size());
  constexpr std::int64_t kBranch = 8;

  b.state("root");
  b.state("good");
  std::vector<std::string> tree;
  for (std::int64_t i = 0; i < tree_size; ++i) tree.push_back(padded("dz", i, width));
  for (const std::string& name : tree) b.state(name);
  b.state("goal");
  b.state("sink");

  b.action("root", "safe", {{"good", Rational(1)}});
  b.action("root", "risky", {{"sink", Rational(99, 100)}, {tree[0], Rational(1, 100)}});
  b.action("good", "gamble", {{"goal", Rational(1, 2)}, {"sink", Rational(1, 2)}});

  for (std::int64_t i = 0; i < tree_size; ++i) {
    const std::int64_t first_child = i * kBranch + 1;
    if (first_child < tree_size) {
      const std::int64_t child_count = std::min<std::int64_t>(kBranch, tree_size - first_child);
      std::vector<std::pair<std::string, Rational>> transitions;
      for (std::int64_t c = 0; c < child_count; ++c) {
        transitions.emplace_back(tree[static_cast<std::size_t>(first_child + c)], Rational(1, child_count));
      }
      b.action(tree[static_cast<std::size_t>(i)], "down", std::move(transitions));
    } else {
      b.action(tree[static_cast<std::size_t>(i)], "try",
               {{"goal", Rational(1, 64)}, {"sink", Rational(63, 64)}});
    }
  }
  b.action("goal", "!loop", {{"goal", Rational(1)}});
  b.action("sink", "!loop", {{"sink", Rational(1)}});
  b.initial("root");
  b.target("goal");

  GeneratedModel out{b.build(), {}};
  out.meta["family"] = "deadzone";
  out.meta["n"] = n;
  out.meta["seed"] = seed;
  out.meta["value"] = "1/2";
  out.meta["deadzone_states"] = tree_size;
  return out;
}

}  // namespace

GeneratedModel generate(const GeneratorSpec& spec) {
  if (spec.family == "fig1") return generate_fig1();
  if (spec.family == "chain") {
    if (spec.size < 1) throw UsageError("generate: chain size must be positive");
    return generate_chain(spec.size);
  }
  if (spec.family == "grid") return generate_grid(spec.size);
  if (spec.family == "random_ecfree") return generate_random_ecfree(spec.size, spec.seed);
  if (spec.family == "random_ec") return generate_random_ec(spec.size, spec.seed);
  if (spec.family == "deadzone") return generate_deadzone(spec.size, spec.seed);
  throw UsageError("generate: unknown family " + spec.family);
}

}  // namespace mdplv
