#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mdplv/learning.hpp"
#include "mdplv/mdp.hpp"
#include "mdplv/rng.hpp"

namespace mdplv {

/// What a limited-information learner may touch: the initial state, the two
/// designated terminals, the bounds K >= |S|, E_m >= max |E(s)|,
/// p_min <= min positive transition probability, enabled-action queries, and
/// a step sampler. State/action ids are opaque handles.
class LimitedInfo {
 public:
  virtual ~LimitedInfo() = default;
  virtual StateId initial_state() const = 0;
  virtual StateId terminal_one() const = 0;
  virtual StateId terminal_zero() const = 0;
  virtual std::int64_t state_bound() const = 0;      // K
  virtual std::int64_t branching_bound() const = 0;  // E_m
  virtual double pmin() const = 0;
  virtual std::span<const ActionId> enabled(StateId s) = 0;
  virtual StateId sample_step(StateId s, ActionId a, SplitMix64& rng) = 0;
  // dense-id capacities so the learner can use flat tables
  virtual StateId state_capacity() const = 0;
  virtual ActionId action_capacity() const = 0;
};

/// Test/benchmark oracle backed by a hidden normalized model.
class HiddenModelOracle : public LimitedInfo {
 public:
  explicit HiddenModelOracle(const Mdp& hidden);
  StateId initial_state() const override { return hidden_->initial; }
  StateId terminal_one() const override { return *hidden_->terminal_one; }
  StateId terminal_zero() const override { return *hidden_->terminal_zero; }
  std::int64_t state_bound() const override { return hidden_->state_count(); }
  std::int64_t branching_bound() const override;
  double pmin() const override;
  std::span<const ActionId> enabled(StateId s) override {
    return hidden_->enabled[static_cast<std::size_t>(s)];
  }
  StateId sample_step(StateId s, ActionId a, SplitMix64& rng) override;
  StateId state_capacity() const override { return hidden_->state_count(); }
  ActionId action_capacity() const override { return hidden_->action_count(); }

 private:
  const Mdp* hidden_;
};

/// Delay m and estimator precision ebar. The theoretical closed forms are
/// always evaluated and reported; desk-scale runs override the pair in use
/// (the theoretical delay is astronomical for any nontrivial model).
struct DqlParams {
  std::int64_t m = 1;
  double ebar = 0.0;
  bool override_used = false;

  double theoretical_ebar = 0.0;
  double theoretical_m = 0.0;  // real-valued, may be inf
  bool theoretical_representable = false;

  /// PAC parameters for precision epsilon and tolerance delta, with the
  /// limited-information substitutions |S| -> K and |S||A| -> K * A_bound.
  /// odql switches the log constant 6 to 24 (DQL at tolerance delta/4).
  static DqlParams theoretical(double epsilon, double delta, std::int64_t k_bound,
                               std::int64_t em_bound, double pmin, std::int64_t a_bound, bool odql);

  DqlParams with_override(std::int64_t m_used, double ebar_used) const;
};

/// Per-pair accumulators, counters, learn flags and timestamps of the
/// delayed update rule, plus the global clock and last-success marks.
class DqlState {
 public:
  void ensure(ActionId a);
  bool learn_u(ActionId a) const { return pairs_[static_cast<std::size_t>(a)].learn_u; }
  bool learn_l(ActionId a) const { return pairs_[static_cast<std::size_t>(a)].learn_l; }
  std::int32_t count_u(ActionId a) const { return pairs_[static_cast<std::size_t>(a)].c_u; }
  std::int32_t count_l(ActionId a) const { return pairs_[static_cast<std::size_t>(a)].c_l; }
  double accum_u(ActionId a) const { return pairs_[static_cast<std::size_t>(a)].accum_u; }
  double accum_l(ActionId a) const { return pairs_[static_cast<std::size_t>(a)].accum_l; }

  std::int64_t successful_u = 0, successful_l = 0;
  std::int64_t attempted_u = 0, attempted_l = 0;
  std::int64_t clamped = 0;

 private:
  friend class DqlCore;
  struct PairState {
    double accum_u = 0.0, accum_l = 0.0;
    std::int32_t c_u = 0, c_l = 0;
    bool learn_u = true, learn_l = true;
    std::int64_t t_u = 0, t_l = 0;
  };
  std::vector<PairState> pairs_;
  std::int64_t t_star_u_ = 0, t_star_l_ = 0;
  std::int64_t clock_ = 0;
};

/// Bound tables for opaque-id learners: flat per-action U/L plus the
/// state-level maxima computed over the oracle's enabled sets.
class LimitedBounds {
 public:
  LimitedBounds(LimitedInfo& oracle);
  double u(ActionId a) const { return u_[static_cast<std::size_t>(a)]; }
  double l(ActionId a) const { return l_[static_cast<std::size_t>(a)]; }
  void set_u(ActionId a, double v) { u_[static_cast<std::size_t>(a)] = v; }
  void set_l(ActionId a, double v) { l_[static_cast<std::size_t>(a)] = v; }
  double state_u(StateId s);
  double state_l(StateId s);

 private:
  LimitedInfo* oracle_;
  std::vector<double> u_, l_;
};

/// One delayed update on the pair (s,a) given the successor's current bound:
/// accumulate until the counter hits m, then attempt; a successful attempt
/// shifts the estimate by +/- ebar, an unsuccessful one may clear the learn
/// flag until another success re-enables it.
class DqlCore {
 public:
  DqlCore(const DqlParams& params) : params_(params) {}

  // bound_u/bound_l of the successor state are passed in so the same core
  // serves both the flat learner and the collapsed-state learner.
  void update_pair(DqlState& st, LimitedBounds& bounds, ActionId a, double succ_u, double succ_l);

  const DqlParams& params() const { return params_; }

 private:
  DqlParams params_;
};

struct DqlResult {
  RunReport report;
  DqlParams params;
};

/// DQL instantiation of the Explore/Update loop against a sampling oracle.
/// The PAC guarantee applies only when the parameters are the theoretical
/// ones; overrides are reported as such.
DqlResult run_dql(LimitedInfo& oracle, const LearnConfig& cfg, const DqlParams& params);

}  // namespace mdplv
