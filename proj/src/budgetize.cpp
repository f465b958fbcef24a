#include "abp/errors.hpp"
#include "abp/exact.hpp"

#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

namespace abp {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// The surgery mutates nodes in place, which is only sound when every node has
// a single parent (trees from build_policy_tree always do).
void require_tree_shape(const PolicyTree& t) {
  std::vector<unsigned> indeg(t.nodes.size(), 0);
  for (const TreeNode& node : t.nodes)
    for (const TreeArc& arc : node.arcs) {
      if (arc.child >= t.nodes.size())
        throw validation_error("arc points past the node array");
      ++indeg[arc.child];
    }
  if (!t.nodes.empty() && indeg[0] != 0)
    throw validation_error("budget surgery requires tree-shaped input (root has a parent)");
  for (std::size_t i = 1; i < t.nodes.size(); ++i)
    if (indeg[i] > 1)
      throw validation_error("budget surgery requires tree-shaped input (shared subtree)");
}

// Recompute the open labels from the assignment (first use per root path).
void refresh_open_flags(PolicyTree& t) {
  std::vector<char> seen(t.bins_used, 0);
  std::function<void(std::size_t)> walk = [&](std::size_t idx) {
    TreeNode& node = t.nodes[idx];
    if (node.level == t.n_items) return;
    if (node.bin >= seen.size()) seen.resize(node.bin + 1, 0);
    const char was = seen[node.bin];
    node.open = was ? 0 : 1;
    seen[node.bin] = 1;
    for (const TreeArc& arc : node.arcs) walk(arc.child);
    seen[node.bin] = was;
  };
  if (!t.nodes.empty()) walk(0);
}

struct Surgeon {
  const Instance& inst;
  PolicyTree t;    // working copy; bins and labels are rewritten in place
  Quad budget;     // gamma / C
  Quad infl;       // C + 2*delta
  Quad mid;        // C + delta
  Rational truth;  // C
  std::size_t next_bin;
  std::deque<std::size_t> queue;
  std::size_t phase1_splits = 0;
  std::size_t phase2_singletons = 0;

  // --- split stage ---------------------------------------------------------
  // For bin j: along every root path, charge risk at each j-use; once the
  // accumulated risk first exceeds the budget, every strictly later j-use on
  // the path is handed to one fresh bin per open instance of j. Labels:
  // non-diverted j-nodes drop to C + delta, diverted nodes keep C + 2*delta
  // exactly where the outcome still overflows the (lighter) fresh bin.
  void split_walk(std::size_t idx, std::size_t j, bool seen, Rational usage, Rational risk,
                  bool violated, std::size_t* divert_slot, Rational usage_div) {
    TreeNode& node = t.nodes[idx];
    if (node.level == t.n_items) return;
    const FiniteDiscrete& law = inst.items[node.level].fin();

    std::size_t local_divert = kNone;
    if (node.bin == j && !seen) {
      seen = true;
      usage = 0;
      risk = 0;
      violated = false;
      divert_slot = &local_divert;
    }

    if (node.bin == j && violated) {
      if (*divert_slot == kNone) {
        *divert_slot = next_bin++;
        queue.push_back(*divert_slot);
        ++phase1_splits;
      }
      node.bin = *divert_slot;
      for (TreeArc& arc : node.arcs) {
        const Rational nu = usage_div + law.atoms[arc.atom].value;
        arc.label = nu > inst.capacity ? infl : Quad(Rational(0));
        split_walk(arc.child, j, seen, usage, risk, violated, divert_slot, nu);
      }
      return;
    }

    if (node.bin == j) {
      const Rational p = overflow_prob_exact(law, usage, inst.capacity);
      risk += p;
      const bool violates_here = Quad(risk) > budget;
      for (TreeArc& arc : node.arcs) {
        const Rational nu = usage + law.atoms[arc.atom].value;
        arc.label = nu > inst.capacity ? mid : Quad(Rational(0));
        split_walk(arc.child, j, seen, nu, risk, violates_here, divert_slot, Rational(0));
      }
      return;
    }

    for (const TreeArc& arc : node.arcs)
      split_walk(arc.child, j, seen, usage, risk, violated, divert_slot, usage_div);
  }

  // --- singleton stage -----------------------------------------------------
  // After the split stage a bin violates at most once per path and has no
  // uses below the violation. Move the violating item to a fresh singleton
  // bin unless it is the bin's first item on the path (then the bin already
  // is a singleton whose lone charge exceeds the budget: exempt). Labels on
  // the bin's surviving nodes drop to the true penalty.
  void singleton_walk(std::size_t idx, std::size_t j, bool seen, Rational usage, Rational risk,
                      bool violated) {
    TreeNode& node = t.nodes[idx];
    if (node.level == t.n_items) return;
    const FiniteDiscrete& law = inst.items[node.level].fin();

    if (node.bin == j) {
      if (violated)
        throw std::logic_error("budget surgery: use survived below a violation");
      const bool first = !seen;
      const Rational p = overflow_prob_exact(law, usage, inst.capacity);
      if (Quad(risk + p) > budget && !first) {
        // move this item to a fresh singleton; j's risk stays within budget
        node.bin = next_bin++;
        ++phase2_singletons;
        for (TreeArc& arc : node.arcs) {
          const Rational nu = law.atoms[arc.atom].value;
          arc.label = nu > inst.capacity ? Quad(truth) : Quad(Rational(0));
          singleton_walk(arc.child, j, seen, usage, risk, false);
        }
        return;
      }
      const bool violates_here = Quad(risk + p) > budget;  // first item, exempt
      for (TreeArc& arc : node.arcs) {
        const Rational nu = usage + law.atoms[arc.atom].value;
        arc.label = nu > inst.capacity ? Quad(truth) : Quad(Rational(0));
        singleton_walk(arc.child, j, true, nu, risk + p, violates_here);
      }
      return;
    }

    for (const TreeArc& arc : node.arcs)
      singleton_walk(arc.child, j, seen, usage, risk, violated);
  }

  // --- truthful relabel ----------------------------------------------------
  void relabel_walk(std::size_t idx, std::map<std::size_t, Rational>& usage) {
    TreeNode& node = t.nodes[idx];
    if (node.level == t.n_items) return;
    const FiniteDiscrete& law = inst.items[node.level].fin();
    const bool first = usage.find(node.bin) == usage.end();
    const Rational u = first ? Rational(0) : usage[node.bin];
    for (TreeArc& arc : node.arcs) {
      const Rational nu = u + law.atoms[arc.atom].value;
      arc.label = nu > inst.capacity ? Quad(truth) : Quad(Rational(0));
      usage[node.bin] = nu;
      relabel_walk(arc.child, usage);
    }
    if (first)
      usage.erase(node.bin);
    else
      usage[node.bin] = u;
  }
};

}  // namespace

bool tree_is_budgeted(const PolicyTree& tree, const Instance& inst, const Quad& gamma) {
  if (tree.nodes.empty()) return true;
  const Quad budget = gamma * Quad(inst.penalty).inverse();
  // per-bin (usage, risk, item count) along the current path
  std::map<std::size_t, std::tuple<Rational, Rational, std::size_t>> bins;
  bool ok = true;
  std::function<void(std::size_t)> walk = [&](std::size_t idx) {
    if (!ok) return;
    const TreeNode& node = tree.nodes[idx];
    if (node.level == tree.n_items) {
      for (const auto& [id, state] : bins) {
        (void)id;
        if (Quad(std::get<1>(state)) > budget && std::get<2>(state) != 1) {
          ok = false;
          return;
        }
      }
      return;
    }
    const FiniteDiscrete& law = inst.items[node.level].fin();
    auto it = bins.find(node.bin);
    const bool first = it == bins.end();
    const auto saved = first ? std::tuple<Rational, Rational, std::size_t>{0, 0, 0} : it->second;
    const Rational u = std::get<0>(saved);
    const Rational p = overflow_prob_exact(law, u, inst.capacity);
    for (const TreeArc& arc : node.arcs) {
      bins[node.bin] = {u + law.atoms[arc.atom].value, std::get<1>(saved) + p,
                        std::get<2>(saved) + 1};
      walk(arc.child);
      if (!ok) return;
    }
    if (first)
      bins.erase(node.bin);
    else
      bins[node.bin] = saved;
  };
  walk(0);
  return ok;
}

BudgetizeReport budgetize_policy_tree(const PolicyTree& tree, const Quad& gamma,
                                      const Instance& inst, const TreeLimits& lim) {
  (void)lim;  // the surgery reassigns and relabels nodes; it never adds any
  inst.validate();
  if (gamma.sign() <= 0) throw validation_error("budget multiplier must be positive");
  validate_tree(tree, inst);
  require_tree_shape(tree);

  BudgetizeReport rep;
  rep.input_cost = eval_policy_tree(tree, inst);

  if (tree_is_budgeted(tree, inst, gamma)) {
    rep.tree = tree;
    rep.output_cost = rep.input_cost;
    rep.inflated_cost = rep.input_cost;
    rep.phase1_cost = rep.input_cost;
    rep.phase2_cost = rep.input_cost;
    rep.changed = false;
    return rep;
  }

  const Quad delta = Quad(inst.penalty) * gamma.inverse();
  Surgeon s{inst,
            tree,
            gamma * Quad(inst.penalty).inverse(),
            Quad(inst.penalty) + Quad(Rational(2)) * delta,
            Quad(inst.penalty) + delta,
            inst.penalty,
            tree.bins_used,
            {}};

  // inflate every overflow label to C + 2*delta
  for (TreeNode& node : s.t.nodes)
    for (TreeArc& arc : node.arcs)
      if (arc.label.sign() > 0) arc.label = s.infl;
  rep.inflated_cost = eval_policy_tree(s.t, inst);

  for (std::size_t j = 0; j < tree.bins_used; ++j) s.queue.push_back(j);
  while (!s.queue.empty()) {
    const std::size_t j = s.queue.front();
    s.queue.pop_front();
    s.split_walk(0, j, false, Rational(0), Rational(0), false, nullptr, Rational(0));
  }
  s.t.bins_used = s.next_bin;
  refresh_open_flags(s.t);
  rep.phase1_cost = eval_policy_tree(s.t, inst);

  const std::size_t bins_after_split = s.next_bin;
  for (std::size_t j = 0; j < bins_after_split; ++j)
    s.singleton_walk(0, j, false, Rational(0), Rational(0), false);
  s.t.bins_used = s.next_bin;
  refresh_open_flags(s.t);
  rep.phase2_cost = eval_policy_tree(s.t, inst);

  {
    std::map<std::size_t, Rational> usage;
    s.relabel_walk(0, usage);
  }
  refresh_open_flags(s.t);
  validate_tree(s.t, inst);
  if (!tree_is_budgeted(s.t, inst, gamma))
    throw std::logic_error("budget surgery left a violating path");

  rep.output_cost = eval_policy_tree(s.t, inst);
  const Quad factor = Quad(Rational(1)) + Quad(Rational(2)) * gamma.inverse();
  if (rep.output_cost > factor * rep.input_cost)
    throw std::logic_error("budget surgery exceeded the (1 + 2/gamma) cost bound");

  rep.phase1_splits = s.phase1_splits;
  rep.phase2_singletons = s.phase2_singletons;
  rep.changed = s.phase1_splits + s.phase2_singletons > 0;
  rep.tree = std::move(s.t);
  return rep;
}

}  // namespace abp
