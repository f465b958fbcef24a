// Acceptance harness: run as `abp_acceptance <criterion>` with criterion in
// 1..12. Each criterion prints indented detail lines followed by exactly one
// "PASS criterion N: ..." or "FAIL criterion N: ..." line; the process exits 0
// only on PASS. Every tolerance, seed, and parameter is pinned here.

#include "abp/engine.hpp"
#include "abp/errors.hpp"
#include "abp/exact.hpp"
#include "abp/generators.hpp"
#include "abp/instance.hpp"
#include "abp/mdp.hpp"
#include "abp/policies.hpp"
#include "abp/ptas.hpp"
#include "abp/rational.hpp"
#include "abp/reduction.hpp"
#include "abp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace abp;

namespace {

void detail(const std::string& line) { std::cout << "  " << line << '\n'; }

std::string fmt(double x) { return format_double(x); }

// ---------------------------------------------------------------------------
// Shared builders
// ---------------------------------------------------------------------------

Instance gen(const std::string& name, std::size_t n, int penalty) {
  GenParams p;
  p.n = n;
  p.penalty = Rational(penalty);
  return gen_named(name, p);
}

// Random instance on capacity 1: sizes are sixths in [0, 7/6], at most three
// atoms per law, integer penalty in [min_penalty, min_penalty + 6].
Instance random_instance(Rng& rng, std::size_t max_n, int min_penalty, bool force_iid) {
  const std::size_t n = 1 + rng.next_u64() % max_n;
  const std::size_t n_laws = force_iid ? 1 : n;
  std::vector<SizeDistribution> laws;
  laws.reserve(n_laws);
  for (std::size_t l = 0; l < n_laws; ++l) {
    const std::size_t n_atoms = 1 + rng.next_u64() % 3;
    std::vector<int> sixths;
    while (sixths.size() < n_atoms) {
      const int v = int(rng.next_u64() % 8);
      if (std::find(sixths.begin(), sixths.end(), v) == sixths.end()) sixths.push_back(v);
    }
    std::vector<Rational> weights;
    Rational total = 0;
    for (std::size_t a = 0; a < n_atoms; ++a) {
      weights.push_back(Rational(int(1 + rng.next_u64() % 9)));
      total += weights.back();
    }
    std::vector<Atom> atoms;
    for (std::size_t a = 0; a < n_atoms; ++a) {
      atoms.push_back({Rational(sixths[a], 6), weights[a] / total});
    }
    laws.push_back(SizeDistribution::finite(atoms));
  }
  Instance inst;
  for (std::size_t i = 0; i < n; ++i) inst.items.push_back(laws[force_iid ? 0 : i]);
  inst.penalty = Rational(min_penalty + int(rng.next_u64() % 7));
  inst.validate();
  return inst;
}

// Independent adaptive optimum: direct min/expectation recursion over the live
// (unbroken) bin usages, no memoization shared with the production DP. The
// action is fixed before the size realizes; later actions adapt per outcome.
Rational oracle_best(const Instance& inst, std::size_t t, std::vector<Rational>& live) {
  if (t == inst.size()) return Rational(0);
  const FiniteDiscrete& law = inst.items[t].fin();
  Rational best = 0;
  bool have = false;
  for (std::size_t choice = 0; choice <= live.size(); ++choice) {
    if (choice < live.size()) {
      bool dup = false;
      for (std::size_t k = 0; k < choice; ++k) dup = dup || live[k] == live[choice];
      if (dup) continue;  // same usage, same future: one representative suffices
    }
    const bool open = choice == live.size();
    Rational total = open ? Rational(1) : Rational(0);
    for (const Atom& atom : law.atoms) {
      Rational contrib;
      if (open) {
        if (atom.value > inst.capacity) {
          contrib = inst.penalty + oracle_best(inst, t + 1, live);
        } else {
          live.push_back(atom.value);
          contrib = oracle_best(inst, t + 1, live);
          live.pop_back();
        }
      } else if (live[choice] + atom.value > inst.capacity) {
        const Rational saved = live[choice];
        live.erase(live.begin() + long(choice));
        contrib = inst.penalty + oracle_best(inst, t + 1, live);
        live.insert(live.begin() + long(choice), saved);
      } else {
        const Rational saved = live[choice];
        live[choice] = saved + atom.value;
        contrib = oracle_best(inst, t + 1, live);
        live[choice] = saved;
      }
      total += atom.prob * contrib;
    }
    if (!have || total < best) {
      have = true;
      best = total;
    }
  }
  return best;
}

MonteCarloStats mc(const Instance& inst, const std::string& policy, std::size_t trials,
                   std::uint64_t seed, bool per_bin = false) {
  MonteCarloOptions o;
  o.trials = trials;
  o.seed = seed;
  o.per_bin = per_bin;
  return monte_carlo(inst, parse_policy_spec(policy), o);
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

// Exact optimum DP == independent adaptive-policy enumeration, 50 random
// instances, n <= 6, at most 3 atoms, exact rational equality.
bool criterion1(std::string& msg) {
  std::size_t matches = 0;
  for (int i = 0; i < 50; ++i) {
    Rng rng(100 + std::uint64_t(i), 0);
    const Instance inst = random_instance(rng, 6, 1, i % 2 == 0);
    const OptimalDpResult dp = optimal_cost_dp(inst);
    std::vector<Rational> live;
    const Rational reference = oracle_best(inst, 0, live);
    if (dp.value == reference) {
      ++matches;
    } else {
      detail("instance " + std::to_string(i) + ": dp " + format_rational(dp.value) +
             " != enumeration " + format_rational(reference));
    }
  }
  msg = "optimal-cost DP matches exhaustive enumeration on " + std::to_string(matches) +
        "/50 random instances (exact rational equality)";
  return matches == 50;
}

// Risk identity: E[broken] == E[summed pack-time risk]; empirical gap within
// 4 standard errors of the per-trial difference.
bool criterion2(std::string& msg) {
  const Instance inst = gen("three_point", 200, 50);
  bool ok = true;
  for (const char* policy : {"bg:sqrt2", "fg", "tg:2/5"}) {
    const MonteCarloStats s = mc(inst, policy, 100000, 20002);
    const double gap = std::abs(s.mean_broken - s.mean_total_risk);
    const double tol = 4.0 * s.stderr_broken_minus_risk;
    detail(std::string(policy) + ": mean broken " + fmt(s.mean_broken) + ", mean risk " +
           fmt(s.mean_total_risk) + ", |gap| " + fmt(gap) + " vs 4*se " + fmt(tol));
    ok = ok && gap <= tol;
  }
  msg = "martingale risk identity holds within 4 standard errors on three_point(n=200, C=50), "
        "1e5 episodes, policies bg:sqrt2 / fg / tg:2/5";
  return ok;
}

// Budgeted-greedy invariants: per bin index, break frequency <= (gamma/C) *
// open frequency (+4 binomial se); aggregate mean cost <= (1+gamma) * mean
// opened (+4 se).
bool criterion3(std::string& msg) {
  struct Gamma {
    const char* policy;
    double value;
  };
  const Gamma gammas[] = {{"bg:1", 1.0}, {"bg:sqrt2", std::sqrt(2.0)}, {"bg:2", 2.0}};
  struct Setup {
    const char* family;
    std::size_t n;
    std::uint64_t seed;
  };
  const Setup setups[] = {{"three_point", 200, 30001}, {"exp_blocks", 120, 30002}};
  const double penalty = 50.0;
  const std::size_t trials = 20000;
  bool ok = true;
  for (const Setup& su : setups) {
    const Instance inst = gen(su.family, su.n, 50);
    for (const Gamma& g : gammas) {
      const MonteCarloStats s = mc(inst, g.policy, trials, su.seed, /*per_bin=*/true);
      const double ratio = g.value / penalty;
      const double t_d = double(trials);
      std::size_t bad_bins = 0;
      double se_opened_bound = 0;
      for (std::size_t j = 0; j < s.per_bin.open_count.size(); ++j) {
        const double oh = double(s.per_bin.open_count[j]) / t_d;
        const double bh = double(s.per_bin.break_count[j]) / t_d;
        const double se_o = std::sqrt(oh * (1 - oh) / t_d);
        const double se_b = std::sqrt(bh * (1 - bh) / t_d);
        se_opened_bound += se_o;
        if (bh > ratio * oh + 4.0 * (se_b + ratio * se_o)) ++bad_bins;
      }
      const double lhs = s.mean_cost;
      const double rhs = (1.0 + g.value) * s.mean_opened +
                         4.0 * (s.stderr_cost + (1.0 + g.value) * se_opened_bound);
      detail(std::string(su.family) + " " + g.policy + ": per-bin violations " +
             std::to_string(bad_bins) + "/" + std::to_string(s.per_bin.open_count.size()) +
             ", mean cost " + fmt(lhs) + " vs (1+g)*opened bound " + fmt(rhs));
      ok = ok && bad_bins == 0 && lhs <= rhs;
    }
  }
  msg = "per-bin break/open frequency and aggregate cost bounds hold for bg:{1,sqrt2,2} on "
        "three_point(200) and exp_blocks(120), C=50, 2e4 episodes, 4-sigma tolerances";
  return ok;
}

// Budgetization surgery: output path-budgeted, exact cost within (1 + 2/gamma)
// of the input, and untouched cost for already-budgeted inputs.
bool criterion4(std::string& msg) {
  const Quad gammas[] = {Quad(Rational(1)), Quad::sqrt2(), Quad(Rational(2))};
  const char* specs[] = {"fg", "tg:2/5"};
  std::size_t cases = 0, already = 0, changed = 0;
  bool ok = true;
  for (int i = 0; i < 30; ++i) {
    Rng rng(400 + std::uint64_t(i), 0);
    Instance inst;
    if (i % 3 == 0) {
      // Reliable budget violator: {0,1} with P(1) = 1/C makes full greedy
      // re-use the bin at the C*p == 1 boundary and accumulate risk.
      const int c = 3 + int(rng.next_u64() % 5);
      const std::size_t n = 3 + rng.next_u64() % 2;
      Instance bern;
      for (std::size_t k = 0; k < n; ++k) {
        bern.items.push_back(SizeDistribution::finite(
            {{Rational(0), 1 - Rational(1, c)}, {Rational(1), Rational(1, c)}}));
      }
      bern.penalty = Rational(c);
      inst = bern;
    } else {
      inst = random_instance(rng, 4, 2, i % 2 == 0);
    }
    for (const char* spec_text : specs) {
      const PolicySpec spec = parse_policy_spec(spec_text);
      const PolicyTree tree = build_policy_tree(inst, spec);
      for (const Quad& gamma : gammas) {
        ++cases;
        const bool input_budgeted = tree_is_budgeted(tree, inst, gamma);
        const BudgetizeReport rep = budgetize_policy_tree(tree, gamma, inst);
        validate_tree(rep.tree, inst);
        const Quad bound = (Quad(Rational(1)) + Quad(Rational(2)) * gamma.inverse()) * rep.input_cost;
        bool case_ok = tree_is_budgeted(rep.tree, inst, gamma) && rep.output_cost <= bound;
        if (input_budgeted) {
          ++already;
          case_ok = case_ok && rep.output_cost == rep.input_cost;
        }
        if (rep.changed) ++changed;
        if (!case_ok) {
          detail("instance " + std::to_string(i) + " " + spec_text + " gamma " +
                 format_quad(gamma) + ": surgery invariant violated");
          ok = false;
        }
      }
    }
  }
  detail(std::to_string(cases) + " cases; " + std::to_string(already) +
         " already budgeted (cost preserved exactly), " + std::to_string(changed) +
         " rewritten");
  msg = "budgetization yields path-budgeted trees within the exact (1+2/gamma) cost factor on "
        "30 instances x {fg, tg:2/5} x gamma {1, sqrt2, 2}";
  return ok;
}

// Budgeted greedy opens the fewest bins among budget-respecting policies
// (exact, i.i.d.), and its cost is within 3 + 2*sqrt2 of the optimum.
bool criterion5(std::string& msg) {
  const struct {
    const char* text;
    Quad gamma;
  } gammas[] = {{"bg:1", Quad(Rational(1))}, {"bg:sqrt2", Quad::sqrt2()}, {"bg:2", Quad(Rational(2))}};
  bool ok = true;
  for (int i = 0; i < 20; ++i) {
    Rng rng(500 + std::uint64_t(i), 0);
    const Instance inst = random_instance(rng, 5, 2, /*force_iid=*/true);
    for (const auto& g : gammas) {
      const ExactPolicyStats st = exact_policy_stats(inst, parse_policy_spec(g.text));
      const Rational min_opened = min_opened_budgeted(inst, g.gamma);
      if (st.opened != min_opened) {
        detail("instance " + std::to_string(i) + " " + g.text + ": greedy opened " +
               format_rational(st.opened) + " != budgeted minimum " + format_rational(min_opened));
        ok = false;
      }
    }
    const OptimalDpResult dp = optimal_cost_dp(inst);
    const ExactPolicyStats st = exact_policy_stats(inst, parse_policy_spec("bg:sqrt2"));
    if (!(Quad(st.cost) <= Quad(Rational(3), Rational(2)) * Quad(dp.value))) {
      detail("instance " + std::to_string(i) + ": bg:sqrt2 cost " + format_rational(st.cost) +
             " exceeds (3+2*sqrt2) * optimum " + format_rational(dp.value));
      ok = false;
    }
  }
  msg = "exact bg opened-bin means equal the budgeted minimum and bg:sqrt2 stays within "
        "3+2*sqrt2 of the optimum on 20 random i.i.d. instances (exact arithmetic)";
  return ok;
}

// Long-horizon competitive ratios against the single-active-bin optimum on
// three_point: the budgeted policies sit in pinned windows, the greedy family
// is at least an order of magnitude worse.
bool criterion6(std::string& msg) {
  const std::size_t n = 100000;
  const Instance inst = gen("three_point", n, 50);
  const double ref = single_bin_optimal_iid_fp(inst.items[0].fin(), n, 50.0, inst.capacity);
  detail("single-bin reference cost at n=1e5: " + fmt(ref));
  std::map<std::string, double> ratio;
  for (const char* policy : {"bg:1", "bg:sqrt2", "bg:2", "tg:2/5", "fg"}) {
    const MonteCarloStats s = mc(inst, policy, 1000, 60001);
    ratio[policy] = s.mean_cost / ref;
    detail(std::string(policy) + ": mean cost " + fmt(s.mean_cost) + ", ratio " +
           fmt(ratio[policy]) + " +- " + fmt(s.stderr_cost / ref));
  }
  struct Window {
    const char* policy;
    double lo, hi;
  };
  const Window windows[] = {{"bg:1", 1.5, 2.1}, {"bg:sqrt2", 1.6, 2.2}, {"bg:2", 2.4, 3.1}};
  bool ok = true;
  for (const Window& w : windows) {
    const bool in = ratio[w.policy] >= w.lo && ratio[w.policy] <= w.hi;
    detail(std::string(w.policy) + " in [" + fmt(w.lo) + ", " + fmt(w.hi) + "]: " +
           (in ? "yes" : "NO"));
    ok = ok && in;
  }
  const double bar = 10.0 * ratio["bg:1"];
  for (const char* policy : {"tg:2/5", "fg"}) {
    const bool in = ratio[policy] >= bar;
    detail(std::string(policy) + " ratio " + fmt(ratio[policy]) + " >= 10x bg:1 (" + fmt(bar) +
           "): " + (in ? "yes" : "NO"));
    ok = ok && in;
  }
  msg = "three_point(n=1e5, C=50) ratio windows: bg:1 in [1.5,2.1], bg:sqrt2 in [1.6,2.2], "
        "bg:2 in [2.4,3.1]; tg:2/5 and fg at least 10x bg:1";
  return ok;
}

// Schedule robustness: bg:2 stays within 2.5x of the best tested policy at
// every reported prefix of every exponential schedule. Loose tolerance
// acknowledged: the factor absorbs policy crossovers along the horizon.
bool criterion7(std::string& msg) {
  const std::vector<std::size_t> prefixes = {100, 300, 1000, 3000, 10000};
  const char* policies[] = {"bg:1", "bg:sqrt2", "bg:2", "fg", "tg:2/5"};
  bool ok = true;
  for (const char* family : {"exp_increasing", "exp_decreasing", "exp_blocks"}) {
    const Instance inst = gen(family, 10000, 50);
    std::map<std::string, std::vector<double>> means;
    for (const char* policy : policies) {
      MonteCarloOptions o;
      o.trials = 300;
      o.seed = 70001;
      const auto stats = monte_carlo_prefixes(inst, parse_policy_spec(policy), prefixes, o);
      for (const auto& s : stats) means[policy].push_back(s.mean_cost);
    }
    for (std::size_t pi = 0; pi < prefixes.size(); ++pi) {
      double best = means[policies[0]][pi];
      for (const char* policy : policies) best = std::min(best, means[policy][pi]);
      const double bg2 = means["bg:2"][pi];
      const bool in = bg2 <= 2.5 * best;
      detail(std::string(family) + " prefix " + std::to_string(prefixes[pi]) + ": bg:2 " +
             fmt(bg2) + " vs best " + fmt(best) + " (x" + fmt(bg2 / best) + ")" +
             (in ? "" : "  VIOLATION"));
      ok = ok && in;
    }
  }
  msg = "bg:2 within 2.5x of the best tested policy at prefixes {100,300,1000,3000,10000} of "
        "all three exponential schedules (n=1e4, C=50, 300 episodes)";
  return ok;
}

// Lower-bound family: bg:1 pays at least n1/2 while the two-stream rate split
// stays under the explicit O(n1 * (eps + 1/(eps log C))) budget.
bool criterion8(std::string& msg) {
  const std::size_t n1 = 6;
  const double eps = 0.4;
  const int penalty = 22027;  // ln(22027) > 10, so eps * ln C >= 4
  GenParams p;
  p.n1 = n1;
  p.eps = eps;
  p.penalty = Rational(penalty);
  const LowerBoundShape shape = lower_bound_shape(n1, eps, p.penalty);
  const Instance inst = gen_named("exp_lower_bound", p);
  detail("shape: k=" + std::to_string(shape.k) + ", items n=" + std::to_string(shape.n) +
         ", mu=" + fmt(shape.mu) + ", lambda=" + fmt(shape.lambda));

  const MonteCarloStats bg = mc(inst, "bg:1", 2000, 80001);
  const double lower = double(n1) / 2.0 - 4.0 * bg.stderr_cost;
  const bool ok_lower = bg.mean_cost >= lower;
  detail("bg:1 mean cost " + fmt(bg.mean_cost) + " >= n1/2 - 4se = " + fmt(lower) + ": " +
         (ok_lower ? "yes" : "NO"));

  const MonteCarloStats split = mc(inst, "split", 2000, 80001);
  const double logc = std::log(double(penalty));
  const double budget =
      48.0 * double(n1) * (3.0 * eps + 1.0 / (eps * logc)) + 4.0 * split.stderr_cost;
  const bool ok_upper = split.mean_cost <= budget;
  detail("rate-split mean cost " + fmt(split.mean_cost) + " <= 48*n1*(3eps + 1/(eps lnC)) + 4se = " +
         fmt(budget) + ": " + (ok_upper ? "yes" : "NO"));

  msg = "exp_lower_bound(n1=6, eps=0.4, C=22027), 2000 episodes: bg:1 above n1/2, rate-split "
        "below the explicit budget, 4-sigma tolerances";
  return ok_lower && ok_upper;
}

// Approximation pipeline: discretized DP within (1+eps) of the optimum, and
// the tracking executor within (1+4eps) at soft capacity 1+6eps, breach-free.
bool criterion9(std::string& msg) {
  const Rational eps(3, 10);
  const DiscretizationParams params = make_discretization(eps, Rational(81, 10000));
  bool ok = true;
  std::size_t breaches_total = 0;
  for (int i = 0; i < 20; ++i) {
    Rng rng(900 + std::uint64_t(i), 0);
    const Instance inst = random_instance(rng, 5, 2, i % 2 == 0);
    const OptimalDpResult opt = optimal_cost_dp(inst);
    const Instance hat = discretize_instance(inst, params);
    const PtasDpResult dp = ptas_dp(hat, params);
    const bool dp_ok = dp.value <= (Rational(1) + eps) * opt.value;

    const std::size_t episodes = 10000;
    double sum = 0, sumsq = 0;
    std::size_t breaches = 0;
    for (std::size_t t = 0; t < episodes; ++t) {
      Rng ep_rng(91000 + std::uint64_t(i), t);
      const TrackReport rep = track_execute(inst, params, dp, ep_rng);
      const double c = to_double(rep.record.cost);
      sum += c;
      sumsq += c * c;
      breaches += rep.breaches;
    }
    breaches_total += breaches;
    const double mean = sum / double(episodes);
    const double var = (sumsq - sum * sum / double(episodes)) / double(episodes - 1);
    const double se = std::sqrt(std::max(0.0, var) / double(episodes));
    const double cap_val = (1.0 + 4.0 * 0.3) * to_double(opt.value) + 4.0 * se;
    const bool track_ok = mean <= cap_val && breaches == 0;
    if (!(dp_ok && track_ok)) {
      detail("instance " + std::to_string(i) + ": dp " + format_rational(dp.value) + " vs opt " +
             format_rational(opt.value) + ", tracked mean " + fmt(mean) + " vs cap " +
             fmt(cap_val) + ", breaches " + std::to_string(breaches));
      ok = false;
    }
  }
  detail("total deviation breaches across 20 x 1e4 episodes: " + std::to_string(breaches_total));
  msg = "eps=3/10 pipeline: discretized DP within (1+eps) of the optimum and tracked executor "
        "within (1+4eps)+4se at capacity 1+6eps with zero breaches on 20 random instances";
  return ok && breaches_total == 0;
}

// Value iteration: monotone values, downward-closed continue region, and the
// extracted threshold policy within +1 of the single-bin optimum (exact).
bool criterion10(std::string& msg) {
  bool ok = true;
  for (int i = 0; i < 20; ++i) {
    Rng rng(1000 + std::uint64_t(i), 0);
    const std::size_t n_atoms = 2 + rng.next_u64() % 3;
    std::vector<int> sixths;
    while (sixths.size() < n_atoms) {
      const int v = int(rng.next_u64() % 8);
      if (std::find(sixths.begin(), sixths.end(), v) == sixths.end()) sixths.push_back(v);
    }
    std::vector<Atom> atoms;
    Rational total = 0;
    std::vector<Rational> w;
    for (std::size_t a = 0; a < n_atoms; ++a) {
      w.push_back(Rational(int(1 + rng.next_u64() % 9)));
      total += w.back();
    }
    for (std::size_t a = 0; a < n_atoms; ++a) atoms.push_back({Rational(sixths[a], 6), w[a] / total});
    const SizeDistribution law = SizeDistribution::finite(atoms);
    const int penalty = 3 + int(rng.next_u64() % 10);

    const MdpOptions opts;
    const ValueIterationResult vi =
        value_iteration(law.fin(), double(penalty), Rational(1), opts);
    bool mono = vi.converged;
    for (std::size_t s = 0; s + 1 < vi.values.size(); ++s) {
      mono = mono && vi.values[s] <= vi.values[s + 1] + 1e-9;
    }
    const ThresholdResult thr = extract_threshold(vi, law.fin(), double(penalty), Rational(1), opts);
    bool prefix = true;
    bool seen_open = false;
    for (char c : thr.prefers_continue) {
      if (!c) seen_open = true;
      if (seen_open && c) prefix = false;
    }

    const std::size_t n = 3 + rng.next_u64() % 4;  // 3..6 items
    Instance inst;
    for (std::size_t k = 0; k < n; ++k) inst.items.push_back(law);
    inst.penalty = Rational(penalty);
    PolicySpec ft;
    ft.kind = PolicyKind::fixed_threshold;
    ft.alpha = thr.alpha;
    ft.label = "ft";
    const Rational cost = exact_policy_stats(inst, ft).cost;
    const Rational single = single_bin_optimal_iid(law.fin(), n, Rational(penalty), Rational(1));
    const bool within = cost <= single + 1;

    if (!(mono && prefix && within)) {
      detail("law " + std::to_string(i) + ": monotone " + (mono ? "yes" : "NO") +
             ", prefix region " + (prefix ? "yes" : "NO") + ", ft cost " + format_rational(cost) +
             " vs single-bin+1 " + format_rational(single + 1));
      ok = false;
    }
  }
  msg = "value iteration gives monotone values with a downward-closed continue region on 20 "
        "random laws; the threshold policy is exactly within +1 of the single-bin optimum";
  return ok;
}

// Counting reduction: searched optimum vs the published closed form and the
// constructive policy, on 5 random width-2 formulas (symmetrized to 3 vars).
bool criterion11(std::string& msg) {
  Rng rng(110001, 0);
  std::size_t match_published = 0, match_constructive = 0;
  Rational last_delta;
  bool delta_uniform = true;
  for (int i = 0; i < 5; ++i) {
    Cnf f;
    f.n_vars = 2;
    const std::size_t n_clauses = 1 + rng.next_u64() % 3;
    for (std::size_t c = 0; c < n_clauses; ++c) {
      const int s1 = rng.next_u64() % 2 ? 1 : -1;
      const int s2 = rng.next_u64() % 2 ? 1 : -1;
      f.clauses.push_back({s1 * 1, s2 * 2});
    }
    const Cnf sym = symmetrize_2cnf(f);
    const ReductionArtifacts art = reduction_instance(sym);
    const std::uint64_t s = count_sat_bruteforce(sym);
    const Rational searched = restricted_policy_search(art);
    const Rational published = reduction_value(art.n, s);
    const Rational constructive = reduction_reference_value(art);
    const Rational delta = searched - published;
    if (i == 0) last_delta = delta;
    delta_uniform = delta_uniform && delta == last_delta;
    if (searched == published) ++match_published;
    if (searched == constructive) ++match_constructive;
    detail("formula " + std::to_string(i) + " (m=" + std::to_string(art.m) +
           ", s=" + std::to_string(s) + "): searched " + format_rational(searched) +
           ", published form " + format_rational(published) + ", constructive " +
           format_rational(constructive) + ", delta " + format_rational(delta));
  }
  detail("constructive policy attains the searched value on " +
         std::to_string(match_constructive) + "/5 formulas");
  if (match_published < 5 && match_constructive == 5 && delta_uniform) {
    detail("searched == constructive on all formulas; both exceed the published closed form "
           "5/2 - 2/2^n - s/2^(2n) by exactly " + format_rational(last_delta) +
           " = 5/2^(n+1) at n=3. The attained value matches 5/2 + 2^-(n+1) - s/2^(2n) instead; "
           "the published form appears to carry an arithmetic slip.");
  }
  msg = "restricted search equals the published closed form on " +
        std::to_string(match_published) + "/5 formulas and the constructive policy on " +
        std::to_string(match_constructive) + "/5";
  return match_published == 5 && match_constructive == 5;
}

// Bit-reproducibility: every Monte Carlo configuration family used above gives
// byte-identical statistics for 1 worker and the maximal worker count.
bool criterion12(std::string& msg) {
  const unsigned max_workers = std::max(2u, default_worker_count());
  detail("comparing workers 1 vs " + std::to_string(max_workers));

  struct Config {
    std::string name;
    Instance inst;
    std::vector<std::string> policies;
    std::vector<std::size_t> prefixes;
    std::size_t trials;
    std::uint64_t seed;
  };
  std::vector<Config> configs;
  configs.push_back({"three_point int path", gen("three_point", 200, 50),
                     {"bg:sqrt2", "fg", "tg:2/5"}, {50, 200}, 10000, 121});
  configs.push_back({"exp_blocks float path", gen("exp_blocks", 1200, 50),
                     {"bg:2", "split", "fg"}, {100, 600, 1200}, 2000, 122});
  {
    GenParams p;
    p.n1 = 2;
    p.eps = 0.5;
    p.penalty = Rational(2981);  // ln(2981) > 8, eps * ln C >= 4
    const Instance lb = gen_named("exp_lower_bound", p);
    configs.push_back({"exp_lower_bound float path", lb, {"bg:1", "split"}, {lb.size()}, 500, 123});
  }
  {
    // Capacity-sized prime denominator defeats the int64 scaling, forcing the
    // exact-rational trial path.
    const Rational tiny = Rational(1) / Rational((BigInt(1) << 61) - 1);
    Instance big;
    for (int k = 0; k < 40; ++k) {
      big.items.push_back(SizeDistribution::finite(
          {{Rational(0), Rational(1, 2)}, {Rational(1, 2) + tiny, Rational(1, 2)}}));
    }
    big.penalty = Rational(7);
    configs.push_back({"exact rational path", big, {"bg:1", "fg"}, {40}, 1500, 124});
  }

  bool ok = true;
  for (const Config& cfg : configs) {
    for (const std::string& policy : cfg.policies) {
      MonteCarloOptions o1;
      o1.trials = cfg.trials;
      o1.seed = cfg.seed;
      o1.workers = 1;
      MonteCarloOptions o2 = o1;
      o2.workers = max_workers;
      const auto a = monte_carlo_prefixes(cfg.inst, parse_policy_spec(policy), cfg.prefixes, o1);
      const auto b = monte_carlo_prefixes(cfg.inst, parse_policy_spec(policy), cfg.prefixes, o2);
      bool same = a.size() == b.size();
      for (std::size_t i = 0; same && i < a.size(); ++i) {
        same = a[i].mean_cost == b[i].mean_cost && a[i].stderr_cost == b[i].stderr_cost &&
               a[i].mean_opened == b[i].mean_opened && a[i].mean_broken == b[i].mean_broken &&
               a[i].mean_total_risk == b[i].mean_total_risk &&
               a[i].mean_trunc_total == b[i].mean_trunc_total &&
               a[i].stderr_broken_minus_risk == b[i].stderr_broken_minus_risk;
      }
      detail(cfg.name + " / " + policy + ": " + (same ? "bit-identical" : "DIFFERS"));
      ok = ok && same;
    }
  }
  msg = "all Monte Carlo paths (int64, floating exponential, exact rational) are bit-identical "
        "across worker counts 1 and " + std::to_string(max_workers);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: abp_acceptance <criterion 1..12>\n";
    return 2;
  }
  const int idx = std::atoi(argv[1]);
  bool ok = false;
  std::string msg;
  try {
    switch (idx) {
      case 1: ok = criterion1(msg); break;
      case 2: ok = criterion2(msg); break;
      case 3: ok = criterion3(msg); break;
      case 4: ok = criterion4(msg); break;
      case 5: ok = criterion5(msg); break;
      case 6: ok = criterion6(msg); break;
      case 7: ok = criterion7(msg); break;
      case 8: ok = criterion8(msg); break;
      case 9: ok = criterion9(msg); break;
      case 10: ok = criterion10(msg); break;
      case 11: ok = criterion11(msg); break;
      case 12: ok = criterion12(msg); break;
      default:
        std::cerr << "usage: abp_acceptance <criterion 1..12>\n";
        return 2;
    }
  } catch (const std::exception& e) {
    std::cout << "FAIL criterion " << idx << ": unexpected exception: " << e.what() << '\n';
    return 1;
  }
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << idx << ": " << msg << '\n';
  return ok ? 0 : 1;
}
