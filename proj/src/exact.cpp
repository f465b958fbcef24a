#include "abp/exact.hpp"

#include "abp/errors.hpp"
#include "abp/mdp.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>

namespace abp {

// ---------------------------------------------------------------------------
// Offline sequential optimum.
// ---------------------------------------------------------------------------

std::string dp_state_key(std::size_t t, const std::vector<Rational>& usages) {
  std::ostringstream os;
  os << t << '|';
  for (std::size_t i = 0; i < usages.size(); ++i) {
    if (i) os << ',';
    os << format_rational(usages[i]);
  }
  return os.str();
}

namespace {

struct DpSolver {
  const Instance& inst;
  const OptimalDpOptions& opts;
  std::map<std::string, Rational> memo;
  OptimalDpResult* out;

  Rational solve(std::size_t t, std::vector<Rational>& usages) {
    if (t == inst.size()) return Rational(0);
    const std::string key = dp_state_key(t, usages);
    auto hit = memo.find(key);
    if (hit != memo.end()) return hit->second;
    if (memo.size() >= opts.max_states)
      throw resource_cap_error("offline optimum: state cap exceeded");

    const FiniteDiscrete& law = inst.items[t].fin();
    Rational best;
    DpAction best_action;
    bool have = false;

    auto consider = [&](const Rational& val, const DpAction& act) {
      if (!have || val < best) {
        have = true;
        best = val;
        best_action = act;
      }
    };

    // Open a fresh bin: +1 now, the outcome may immediately break it.
    {
      Rational val(1);
      for (const Atom& a : law.atoms) {
        if (a.value > inst.capacity) {
          val += a.prob * (inst.penalty + solve(t + 1, usages));
        } else {
          auto pos = std::upper_bound(usages.begin(), usages.end(), a.value);
          usages.insert(pos, a.value);
          Rational sub = solve(t + 1, usages);
          usages.erase(std::lower_bound(usages.begin(), usages.end(), a.value));
          val += a.prob * sub;
        }
      }
      consider(val, DpAction{true, Rational(0)});
    }

    // Use a live bin (one probe per distinct usage value).
    for (std::size_t i = 0; i < usages.size(); ++i) {
      if (i > 0 && usages[i] == usages[i - 1]) continue;
      const Rational u = usages[i];
      Rational val(0);
      for (const Atom& a : law.atoms) {
        const Rational nu = u + a.value;
        // remove one copy of u
        usages.erase(std::lower_bound(usages.begin(), usages.end(), u));
        if (nu > inst.capacity) {
          val += a.prob * (inst.penalty + solve(t + 1, usages));
        } else {
          auto pos = std::upper_bound(usages.begin(), usages.end(), nu);
          usages.insert(pos, nu);
          Rational sub = solve(t + 1, usages);
          usages.erase(std::lower_bound(usages.begin(), usages.end(), nu));
          val += a.prob * sub;
        }
        auto pos = std::upper_bound(usages.begin(), usages.end(), u);
        usages.insert(pos, u);
      }
      consider(val, DpAction{false, u});
    }

    memo.emplace(key, best);
    if (out && opts.keep_actions) out->actions.emplace(key, best_action);
    return best;
  }
};

}  // namespace

OptimalDpResult optimal_cost_dp(const Instance& inst, const OptimalDpOptions& opts) {
  inst.validate();
  if (!inst.all_finite())
    throw validation_error("offline optimum needs finite-support items");
  OptimalDpResult res;
  DpSolver solver{inst, opts, {}, &res};
  std::vector<Rational> usages;
  res.value = solver.solve(0, usages);
  res.states = solver.memo.size();
  return res;
}

ExactDecider dp_action_decider(const OptimalDpResult& dp, const Instance& inst) {
  (void)inst;
  const auto* actions = &dp.actions;
  return [actions](std::span<const ExactBinView> bins, std::size_t t) -> Decision {
    std::vector<Rational> usages;
    for (const ExactBinView& b : bins)
      if (!b.broken) usages.push_back(b.usage);
    std::sort(usages.begin(), usages.end());
    auto it = actions->find(dp_state_key(t, usages));
    if (it == actions->end())
      throw validation_error("optimal action table has no entry for reached state");
    if (it->second.open) return {};
    for (std::size_t j = 0; j < bins.size(); ++j)
      if (!bins[j].broken && bins[j].usage == it->second.usage) return {false, j};
    throw validation_error("optimal action table names a usage that no live bin has");
  };
}

std::string serialize_dp_actions(const OptimalDpResult& dp) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, act] : dp.actions)
    j[key] = act.open ? std::string("open") : "use:" + format_rational(act.usage);
  return j.dump(2);
}

std::map<std::string, DpAction> parse_dp_actions(const std::string& text) {
  std::map<std::string, DpAction> out;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("bad action table: ") + e.what());
  }
  if (!j.is_object()) throw validation_error("bad action table: not an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string v = it.value().get<std::string>();
    if (v == "open")
      out.emplace(it.key(), DpAction{true, Rational(0)});
    else if (v.rfind("use:", 0) == 0)
      out.emplace(it.key(), DpAction{false, parse_rational(v.substr(4))});
    else
      throw validation_error("bad action table entry: " + v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Single-active-bin optimum.
// ---------------------------------------------------------------------------

namespace {

struct SingleBinPlan {
  std::vector<Rational> states;                       // reachable usages <= cap
  std::vector<std::vector<std::ptrdiff_t>> next;      // [state][atom] -> state or -1 (break)
  std::vector<std::ptrdiff_t> from_zero;              // [atom] -> state or -1
  std::vector<Rational> break_prob;                   // P(X + s > cap) per state
  Rational break_prob_zero;
};

SingleBinPlan plan_single_bin(const FiniteDiscrete& d, const Rational& cap,
                              std::size_t max_states) {
  SingleBinPlan plan;
  MdpStateSpace space = build_state_space(d, cap, max_states);
  plan.states = std::move(space.states);
  std::map<Rational, std::size_t> index;
  for (std::size_t i = 0; i < plan.states.size(); ++i) index.emplace(plan.states[i], i);
  auto target = [&](const Rational& v) -> std::ptrdiff_t {
    auto it = index.find(v);
    return it == index.end() ? -1 : std::ptrdiff_t(it->second);
  };
  plan.next.resize(plan.states.size());
  plan.break_prob.resize(plan.states.size());
  for (std::size_t s = 0; s < plan.states.size(); ++s) {
    plan.break_prob[s] = overflow_prob_exact(d, plan.states[s], cap);
    plan.next[s].reserve(d.atoms.size());
    for (const Atom& a : d.atoms)
      plan.next[s].push_back(a.value + plan.states[s] <= cap ? target(plan.states[s] + a.value)
                                                             : -1);
  }
  plan.break_prob_zero = overflow_prob_exact(d, Rational(0), cap);
  for (const Atom& a : d.atoms)
    plan.from_zero.push_back(a.value <= cap ? target(a.value) : -1);
  return plan;
}

}  // namespace

Rational single_bin_optimal_iid(const FiniteDiscrete& d, std::size_t n, const Rational& penalty,
                                const Rational& cap, std::size_t max_usage_states) {
  const SingleBinPlan plan = plan_single_bin(d, cap, max_usage_states);
  const std::size_t S = plan.states.size();
  // v[s] for s < S: active bin at usage states[s]; v[S]: no active bin.
  std::vector<Rational> v(S + 1, Rational(0)), nv(S + 1);
  for (std::size_t r = 1; r <= n; ++r) {
    Rational open_val(1);
    for (std::size_t a = 0; a < d.atoms.size(); ++a) {
      const auto tgt = plan.from_zero[a];
      open_val += d.atoms[a].prob * (tgt < 0 ? penalty + v[S] : v[std::size_t(tgt)]);
    }
    for (std::size_t s = 0; s < S; ++s) {
      Rational cont(0);
      for (std::size_t a = 0; a < d.atoms.size(); ++a) {
        const auto tgt = plan.next[s][a];
        cont += d.atoms[a].prob * (tgt < 0 ? penalty + v[S] : v[std::size_t(tgt)]);
      }
      nv[s] = cont < open_val ? cont : open_val;
    }
    nv[S] = open_val;
    v.swap(nv);
  }
  return v[S];
}

double single_bin_optimal_iid_fp(const FiniteDiscrete& d, std::size_t n, double penalty,
                                 const Rational& cap, std::size_t max_usage_states) {
  const SingleBinPlan plan = plan_single_bin(d, cap, max_usage_states);
  const std::size_t S = plan.states.size();
  std::vector<double> prob(d.atoms.size());
  for (std::size_t a = 0; a < d.atoms.size(); ++a) prob[a] = to_double(d.atoms[a].prob);
  std::vector<double> v(S + 1, 0.0), nv(S + 1);
  for (std::size_t r = 1; r <= n; ++r) {
    double open_val = 1.0;
    for (std::size_t a = 0; a < d.atoms.size(); ++a) {
      const auto tgt = plan.from_zero[a];
      open_val += prob[a] * (tgt < 0 ? penalty + v[S] : v[std::size_t(tgt)]);
    }
    for (std::size_t s = 0; s < S; ++s) {
      double cont = 0.0;
      for (std::size_t a = 0; a < d.atoms.size(); ++a) {
        const auto tgt = plan.next[s][a];
        cont += prob[a] * (tgt < 0 ? penalty + v[S] : v[std::size_t(tgt)]);
      }
      nv[s] = std::min(cont, open_val);
    }
    nv[S] = open_val;
    v.swap(nv);
  }
  return v[S];
}

// ---------------------------------------------------------------------------
// Minimum expected opened bins under the risk budget.
// ---------------------------------------------------------------------------

namespace {

struct BudgetedSolver {
  const Instance& inst;
  Quad budget;  // gamma / C
  std::size_t max_states;
  std::map<std::string, Rational> memo;

  static std::string key_of(std::size_t t, const std::vector<std::pair<Rational, Rational>>& bins) {
    std::ostringstream os;
    os << t << '|';
    for (const auto& [u, r] : bins) os << format_rational(u) << ':' << format_rational(r) << ',';
    return os.str();
  }

  // bins: sorted (usage, risk) pairs, all reusable (risk <= budget).
  Rational solve(std::size_t t, std::vector<std::pair<Rational, Rational>>& bins) {
    if (t == inst.size()) return Rational(0);
    const std::string key = key_of(t, bins);
    auto hit = memo.find(key);
    if (hit != memo.end()) return hit->second;
    if (memo.size() >= max_states)
      throw resource_cap_error("budgeted minimum: state cap exceeded");
    const FiniteDiscrete& law = inst.items[t].fin();

    auto insert_sorted = [&](const std::pair<Rational, Rational>& b) {
      bins.insert(std::upper_bound(bins.begin(), bins.end(), b), b);
    };
    auto erase_one = [&](const std::pair<Rational, Rational>& b) {
      bins.erase(std::lower_bound(bins.begin(), bins.end(), b));
    };

    Rational best;
    bool have = false;

    // Open (always allowed; an over-budget or broken fresh bin is dropped
    // from the reusable set and never referenced again).
    {
      const Rational p0 = overflow_prob_exact(law, Rational(0), inst.capacity);
      Rational val(1);
      for (const Atom& a : law.atoms) {
        const bool reusable = a.value <= inst.capacity && Quad(p0) <= budget;
        if (reusable) {
          const std::pair<Rational, Rational> nb{a.value, p0};
          insert_sorted(nb);
          val += a.prob * solve(t + 1, bins);
          erase_one(nb);
        } else {
          val += a.prob * solve(t + 1, bins);
        }
      }
      best = val;
      have = true;
    }

    // Use an existing reusable bin.
    for (std::size_t i = 0; i < bins.size(); ++i) {
      if (i > 0 && bins[i] == bins[i - 1]) continue;
      const auto b = bins[i];
      const Rational p = overflow_prob_exact(law, b.first, inst.capacity);
      if (!(Quad(b.second + p) <= budget)) continue;  // would blow the budget
      Rational val(0);
      for (const Atom& a : law.atoms) {
        erase_one(b);
        const std::pair<Rational, Rational> nb{b.first + a.value, b.second + p};
        const bool keep = nb.first <= inst.capacity;
        if (keep) insert_sorted(nb);
        val += a.prob * solve(t + 1, bins);
        if (keep) erase_one(nb);
        insert_sorted(b);
      }
      if (!have || val < best) {
        have = true;
        best = val;
      }
    }

    memo.emplace(key, best);
    return best;
  }
};

}  // namespace

Rational min_opened_budgeted(const Instance& inst, const Quad& gamma, std::size_t max_states) {
  inst.validate();
  if (!inst.all_finite())
    throw validation_error("budgeted minimum needs finite-support items");
  BudgetedSolver solver{inst, gamma * Quad(inst.penalty).inverse(), max_states, {}};
  std::vector<std::pair<Rational, Rational>> bins;
  return solver.solve(0, bins);
}

// ---------------------------------------------------------------------------
// Exact policy evaluation by path enumeration.
// ---------------------------------------------------------------------------

namespace {

struct PathWalker {
  const Instance& inst;
  const ExactDecider& decide;
  std::size_t max_paths;
  std::size_t paths = 0;
  Rational cost, opened, broken, risk;

  void go(std::size_t t, std::vector<ExactBinView>& bins, std::size_t op, std::size_t br,
          Rational risk_acc, const Rational& prob) {
    if (t == inst.size()) {
      if (++paths > max_paths) throw resource_cap_error("path enumeration cap exceeded");
      opened += prob * Rational(op);
      broken += prob * Rational(br);
      cost += prob * (Rational(op) + inst.penalty * Rational(br));
      risk += prob * risk_acc;
      return;
    }
    const FiniteDiscrete& law = inst.items[t].fin();
    const Decision d = decide(bins, t);
    std::size_t j;
    if (d.open) {
      j = bins.size();
      bins.push_back({Rational(0), Rational(0), false});
    } else {
      j = d.bin;
      if (j >= bins.size() || bins[j].broken)
        throw validation_error("policy chose an unusable bin");
    }
    const ExactBinView saved = bins[j];
    const Rational p = overflow_prob_exact(law, saved.usage, inst.capacity);
    for (const Atom& a : law.atoms) {
      bins[j].usage = saved.usage + a.value;
      bins[j].risk = saved.risk + p;
      bins[j].broken = bins[j].usage > inst.capacity;
      go(t + 1, bins, op + (d.open ? 1 : 0), br + (bins[j].broken ? 1 : 0), risk_acc + p,
         prob * a.prob);
    }
    bins[j] = saved;
    if (d.open) bins.pop_back();
  }
};

}  // namespace

ExactPolicyStats exact_policy_stats_custom(const Instance& inst, const ExactDecider& decide,
                                           std::size_t max_paths) {
  inst.validate();
  if (!inst.all_finite())
    throw validation_error("exact evaluation needs finite-support items");
  PathWalker w{inst, decide, max_paths, 0, Rational(0), Rational(0), Rational(0), Rational(0)};
  std::vector<ExactBinView> bins;
  w.go(0, bins, 0, 0, Rational(0), Rational(1));
  return {w.cost, w.opened, w.broken, w.risk};
}

ExactPolicyStats exact_policy_stats(const Instance& inst, const PolicySpec& raw_spec,
                                    std::size_t max_paths) {
  const PolicySpec spec = resolve_policy(raw_spec, inst);
  return exact_policy_stats_custom(
      inst,
      [&](std::span<const ExactBinView> bins, std::size_t t) {
        return decide_exact(spec, bins, inst.items[t].fin(), inst.penalty, inst.capacity);
      },
      max_paths);
}

// ---------------------------------------------------------------------------
// Policy trees.
// ---------------------------------------------------------------------------

namespace {

struct TreeBuilder {
  const Instance& inst;
  const ExactDecider& decide;
  const TreeLimits& lim;
  PolicyTree tree;

  std::size_t build(std::size_t t, std::vector<ExactBinView>& bins) {
    if (tree.nodes.size() >= lim.max_nodes)
      throw resource_cap_error("policy tree node cap exceeded");
    const std::size_t idx = tree.nodes.size();
    tree.nodes.emplace_back();
    tree.nodes[idx].level = t;
    if (t == inst.size()) return idx;  // leaf

    const FiniteDiscrete& law = inst.items[t].fin();
    const Decision d = decide(bins, t);
    std::size_t j;
    if (d.open) {
      j = bins.size();
      bins.push_back({Rational(0), Rational(0), false});
    } else {
      j = d.bin;
      if (j >= bins.size() || bins[j].broken)
        throw validation_error("policy chose an unusable bin");
    }
    tree.nodes[idx].bin = j;
    tree.nodes[idx].open = d.open ? 1 : 0;
    tree.bins_used = std::max(tree.bins_used, j + 1);

    const ExactBinView saved = bins[j];
    const Rational p = overflow_prob_exact(law, saved.usage, inst.capacity);
    for (std::size_t a = 0; a < law.atoms.size(); ++a) {
      bins[j].usage = saved.usage + law.atoms[a].value;
      bins[j].risk = saved.risk + p;
      bins[j].broken = bins[j].usage > inst.capacity;
      const bool overflows = bins[j].broken;
      const std::size_t child = build(t + 1, bins);
      tree.nodes[idx].arcs.push_back(
          {a, overflows ? Quad(inst.penalty) : Quad(Rational(0)), child});
    }
    bins[j] = saved;
    if (d.open) bins.pop_back();
    return idx;
  }
};

}  // namespace

PolicyTree build_policy_tree_custom(const Instance& inst, const ExactDecider& decide,
                                    const TreeLimits& lim) {
  inst.validate();
  if (!inst.all_finite())
    throw validation_error("policy trees need finite-support items");
  TreeBuilder b{inst, decide, lim, {}};
  b.tree.n_items = inst.size();
  std::vector<ExactBinView> bins;
  b.build(0, bins);
  return std::move(b.tree);
}

PolicyTree build_policy_tree(const Instance& inst, const PolicySpec& raw_spec,
                             const TreeLimits& lim) {
  const PolicySpec spec = resolve_policy(raw_spec, inst);
  return build_policy_tree_custom(
      inst,
      [&](std::span<const ExactBinView> bins, std::size_t t) {
        return decide_exact(spec, bins, inst.items[t].fin(), inst.penalty, inst.capacity);
      },
      lim);
}

void validate_tree(const PolicyTree& tree, const Instance& inst) {
  if (tree.n_items != inst.size())
    throw validation_error("tree and instance disagree on item count");
  if (tree.nodes.empty()) throw validation_error("empty tree");
  if (!inst.all_finite()) throw validation_error("policy trees need finite-support items");

  std::map<std::size_t, Rational> usage;  // bin id -> usage on current path
  std::vector<char> broken_seen;          // bin id -> broke on current path

  std::function<void(std::size_t)> walk = [&](std::size_t idx) {
    if (idx >= tree.nodes.size()) throw validation_error("arc points past the node array");
    const TreeNode& node = tree.nodes[idx];
    if (node.level == tree.n_items) {
      if (!node.arcs.empty()) throw validation_error("leaf with outgoing arcs");
      return;
    }
    const FiniteDiscrete& law = inst.items[node.level].fin();
    if (node.arcs.size() != law.atoms.size())
      throw validation_error("node arc count does not match the item's support");
    const bool first_use = usage.find(node.bin) == usage.end();
    if ((node.open != 0) != first_use)
      throw validation_error("open label inconsistent with first use of the bin");
    if (node.bin < broken_seen.size() && broken_seen[node.bin])
      throw validation_error("tree uses a bin after it broke");
    const Rational u = first_use ? Rational(0) : usage[node.bin];

    for (std::size_t a = 0; a < node.arcs.size(); ++a) {
      const TreeArc& arc = node.arcs[a];
      if (arc.atom != a) throw validation_error("arcs out of order with the support atoms");
      const TreeNode& child = tree.nodes.at(arc.child);
      if (child.level != node.level + 1) throw validation_error("child level mismatch");
      const Rational nu = u + law.atoms[a].value;
      const bool overflows = nu > inst.capacity;
      if (overflows != (arc.label.sign() > 0))
        throw validation_error("overflow-cost label inconsistent with the outcome");
      usage[node.bin] = nu;
      if (broken_seen.size() <= node.bin) broken_seen.resize(node.bin + 1, 0);
      const char saved_broken = broken_seen[node.bin];
      broken_seen[node.bin] = overflows ? 1 : saved_broken;
      walk(arc.child);
      broken_seen[node.bin] = saved_broken;
    }
    if (first_use)
      usage.erase(node.bin);
    else
      usage[node.bin] = u;
  };
  walk(0);
}

Quad eval_policy_tree(const PolicyTree& tree, const Instance& inst) {
  if (tree.n_items != inst.size())
    throw validation_error("tree and instance disagree on item count");
  std::function<Quad(std::size_t)> value = [&](std::size_t idx) -> Quad {
    const TreeNode& node = tree.nodes.at(idx);
    Quad v{Rational(node.open)};
    if (node.level == tree.n_items) return v;
    const FiniteDiscrete& law = inst.items[node.level].fin();
    if (node.arcs.size() != law.atoms.size())
      throw validation_error("node arc count does not match the item's support");
    for (const TreeArc& arc : node.arcs)
      v = v + Quad(law.atoms[arc.atom].prob) * (arc.label + value(arc.child));
    return v;
  };
  return value(0);
}

Quad eval_policy_tree_leafsum(const PolicyTree& tree, const Instance& inst) {
  if (tree.n_items != inst.size())
    throw validation_error("tree and instance disagree on item count");
  Quad total{Rational(0)};
  std::function<void(std::size_t, Rational, Quad)> walk = [&](std::size_t idx, Rational prob,
                                                              Quad acc) {
    const TreeNode& node = tree.nodes.at(idx);
    acc = acc + Quad(Rational(node.open));
    if (node.level == tree.n_items) {
      total = total + Quad(prob) * acc;
      return;
    }
    const FiniteDiscrete& law = inst.items[node.level].fin();
    for (const TreeArc& arc : node.arcs)
      walk(arc.child, prob * law.atoms[arc.atom].prob, acc + arc.label);
  };
  walk(0, Rational(1), Quad(Rational(0)));
  return total;
}

ExactPolicyStats tree_assignment_stats(const PolicyTree& tree, const Instance& inst) {
  if (tree.n_items != inst.size())
    throw validation_error("tree and instance disagree on item count");
  ExactPolicyStats st{Rational(0), Rational(0), Rational(0), Rational(0)};
  std::map<std::size_t, Rational> usage;
  std::function<void(std::size_t, Rational, std::size_t, std::size_t, Rational)> walk =
      [&](std::size_t idx, Rational prob, std::size_t op, std::size_t br, Rational risk) {
        const TreeNode& node = tree.nodes.at(idx);
        if (node.level == tree.n_items) {
          st.opened += prob * Rational(op);
          st.broken += prob * Rational(br);
          st.cost += prob * (Rational(op) + inst.penalty * Rational(br));
          st.total_risk += prob * risk;
          return;
        }
        const FiniteDiscrete& law = inst.items[node.level].fin();
        const bool first_use = usage.find(node.bin) == usage.end();
        const Rational u = first_use ? Rational(0) : usage[node.bin];
        const Rational p = overflow_prob_exact(law, u, inst.capacity);
        for (const TreeArc& arc : node.arcs) {
          const Rational nu = u + law.atoms[arc.atom].value;
          usage[node.bin] = nu;
          walk(arc.child, prob * law.atoms[arc.atom].prob, op + (first_use ? 1 : 0),
               br + (nu > inst.capacity ? 1 : 0), risk + p);
        }
        if (first_use)
          usage.erase(node.bin);
        else
          usage[node.bin] = u;
      };
  walk(0, Rational(1), 0, 0, Rational(0));
  return st;
}

}  // namespace abp
