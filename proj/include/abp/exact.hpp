#pragma once

#include "abp/engine.hpp"
#include "abp/instance.hpp"
#include "abp/policies.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace abp {

// ---------------------------------------------------------------------------
// Offline sequential optimum for finite-law instances (exact rationals).
// DP state: round + sorted multiset of live (unbroken, usage <= cap) bin
// usages; broken bins pay C immediately and are dropped, opens pay 1
// immediately, which matches terminal accounting by linearity.
// ---------------------------------------------------------------------------

struct OptimalDpOptions {
  std::size_t max_states = 10'000'000;
  bool keep_actions = true;
};

struct DpAction {
  bool open = true;
  Rational usage;  // when !open: pack into a live bin currently at this usage
};

struct OptimalDpResult {
  Rational value;
  std::size_t states = 0;
  // canonical "t|u1,u2,..." state key -> chosen action
  std::map<std::string, DpAction> actions;
};

std::string dp_state_key(std::size_t t, const std::vector<Rational>& usages);

OptimalDpResult optimal_cost_dp(const Instance& inst, const OptimalDpOptions& opts = {});

// Decider that replays the optimal action table inside the exact episode loop
// (picks the lowest-indexed live bin with the recorded usage).
ExactDecider dp_action_decider(const OptimalDpResult& dp, const Instance& inst);

// Action-table (de)serialization: JSON object {state key: "open" | "use:p/q"}.
std::string serialize_dp_actions(const OptimalDpResult& dp);
std::map<std::string, DpAction> parse_dp_actions(const std::string& text);

// ---------------------------------------------------------------------------
// Single-active-bin optimum for n i.i.d. items (the reference benchmark).
// ---------------------------------------------------------------------------

// Exact rational variant (value denominators grow with n; keep n modest).
Rational single_bin_optimal_iid(const FiniteDiscrete& d, std::size_t n, const Rational& penalty,
                                const Rational& cap, std::size_t max_usage_states = 100000);

// Same DP in doubles, usable at n ~ 1e5 as the simulation reference.
double single_bin_optimal_iid_fp(const FiniteDiscrete& d, std::size_t n, double penalty,
                                 const Rational& cap, std::size_t max_usage_states = 100000);

// ---------------------------------------------------------------------------
// Minimum expected opened bins over risk-budgeted policies (i.i.d., tiny n).
// Opening is always allowed (a first item whose tail already exceeds the
// budget self-isolates); reusing a bin requires risk + charge <= budget.
// ---------------------------------------------------------------------------

Rational min_opened_budgeted(const Instance& inst, const Quad& gamma, std::size_t max_states = 2'000'000);

// ---------------------------------------------------------------------------
// Exact policy evaluation by outcome-path enumeration (small instances).
// ---------------------------------------------------------------------------

struct ExactPolicyStats {
  Rational cost;
  Rational opened;
  Rational broken;
  Rational total_risk;
};

ExactPolicyStats exact_policy_stats(const Instance& inst, const PolicySpec& spec,
                                    std::size_t max_paths = 2'000'000);
ExactPolicyStats exact_policy_stats_custom(const Instance& inst, const ExactDecider& decide,
                                           std::size_t max_paths = 2'000'000);

// ---------------------------------------------------------------------------
// Explicit policy trees.
// ---------------------------------------------------------------------------
// Node u at level i decides item i for one outcome history; it names the bin
// that receives item i and carries the open label l in {0,1} (1 iff that bin
// first appears on u's root path). Arc a (one per support atom of item i)
// carries the overflow-cost label c_a (0 when the outcome keeps the bin within
// capacity). Labels are Quad-valued because the budgetization surgery works
// with penalties C + delta and C + 2*delta where delta = C/gamma may involve
// sqrt(2).

struct TreeArc {
  std::size_t atom = 0;
  Quad label;
  std::size_t child = 0;  // node index
};

struct TreeNode {
  std::size_t level = 0;
  std::size_t bin = 0;   // tree-scoped bin id
  unsigned open = 0;     // l-label
  std::vector<TreeArc> arcs;  // empty iff leaf (level == n)
};

struct PolicyTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t n_items = 0;
  std::size_t bins_used = 0;
};

struct TreeLimits {
  std::size_t max_nodes = 4'000'000;
};

PolicyTree build_policy_tree(const Instance& inst, const PolicySpec& spec,
                             const TreeLimits& lim = {});
PolicyTree build_policy_tree_custom(const Instance& inst, const ExactDecider& decide,
                                    const TreeLimits& lim = {});

// Checks arc/support consistency and that the l and c labels are truthful for
// the assignment the tree encodes; throws on violation.
void validate_tree(const PolicyTree& tree, const Instance& inst);

// Expected cost by the node recursion l_u + sum_a p_a (c_a + value(child)).
Quad eval_policy_tree(const PolicyTree& tree, const Instance& inst);
// Independent evaluator: sum over root-leaf paths of prob * (opens + arc labels).
Quad eval_policy_tree_leafsum(const PolicyTree& tree, const Instance& inst);

// Expected opened / broken counts of the assignment encoded by the tree
// (label-independent; recomputed from usages).
ExactPolicyStats tree_assignment_stats(const PolicyTree& tree, const Instance& inst);

// ---------------------------------------------------------------------------
// Risk-budget surgery: rewrites the tree so that, on every root-leaf path,
// every bin's accumulated risk stays within gamma/C, except single-item bins
// whose lone charge already exceeds the budget (those stay as singletons).
// The output tree carries truthful labels; its exact cost is asserted to be
// <= (1 + 2/gamma) times the input cost, and is equal when the input already
// satisfies the budget everywhere.
// ---------------------------------------------------------------------------

struct BudgetizeReport {
  PolicyTree tree;
  Quad input_cost;
  Quad output_cost;
  // Diagnostic label chain, evaluated exactly after each stage with delta =
  // C/gamma: inflated (all overflow labels C + 2*delta), after the split
  // stage (violating bins' labels lowered to C + delta, diverted uses kept at
  // C + 2*delta where they still overflow), after the singleton stage. Each
  // stage can only lower the evaluation; the final truthful relabel is below
  // all three, which is what makes the (1 + 2/gamma) bound an assertion.
  Quad inflated_cost;
  Quad phase1_cost;
  Quad phase2_cost;
  std::size_t phase1_splits = 0;     // bins introduced by splitting after a violation
  std::size_t phase2_singletons = 0; // violating items moved to fresh singletons
  bool changed = false;
};

BudgetizeReport budgetize_policy_tree(const PolicyTree& tree, const Quad& gamma,
                                      const Instance& inst, const TreeLimits& lim = {});

// True iff every root-leaf path satisfies the budget rule described above.
bool tree_is_budgeted(const PolicyTree& tree, const Instance& inst, const Quad& gamma);

}  // namespace abp
