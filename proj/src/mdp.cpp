#include "abp/mdp.hpp"

#include "abp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace abp {

MdpStateSpace build_state_space(const FiniteDiscrete& law, const Rational& cap,
                                std::size_t max_states) {
  MdpStateSpace out;
  std::map<Rational, std::size_t> index;
  std::vector<Rational> frontier;
  auto add = [&](const Rational& s) {
    if (index.count(s)) return false;
    if (index.size() >= max_states)
      throw resource_cap_error("state space exceeds " + std::to_string(max_states) +
                               " reachable usage levels");
    index.emplace(s, 0);
    frontier.push_back(s);
    return true;
  };
  add(Rational(0));
  while (!frontier.empty()) {
    Rational s = frontier.back();
    frontier.pop_back();
    for (const Atom& a : law.atoms) {
      Rational t = s + a.value;
      if (t <= cap) add(t);
    }
  }
  out.states.reserve(index.size());
  for (auto& [s, idx] : index) {
    idx = out.states.size();
    out.states.push_back(s);
  }
  return out;
}

namespace {

struct Transitions {
  // Flattened (target index, probability) pairs per state, targets may be top().
  std::vector<std::vector<std::pair<std::size_t, double>>> cont;
  std::vector<double> cont_cost;
  std::vector<std::pair<std::size_t, double>> open;  // same for every state
  double open_cost = 0.0;
};

Transitions compile_transitions(const MdpStateSpace& space, const FiniteDiscrete& law,
                                double penalty, const Rational& cap) {
  Transitions tr;
  std::map<Rational, std::size_t> index;
  for (std::size_t i = 0; i < space.states.size(); ++i) index.emplace(space.states[i], i);
  const std::size_t top = space.top();
  auto target_of = [&](const Rational& t) {
    auto it = index.find(t);
    return it == index.end() ? top : it->second;
  };
  tr.cont.resize(space.states.size());
  tr.cont_cost.resize(space.states.size());
  for (std::size_t i = 0; i < space.states.size(); ++i) {
    const Rational& s = space.states[i];
    tr.cont_cost[i] = penalty * to_double(overflow_prob_exact(law, s, cap));
    auto& row = tr.cont[i];
    row.reserve(law.atoms.size());
    for (const Atom& a : law.atoms)
      row.emplace_back(target_of(s + a.value), to_double(a.prob));
  }
  tr.open_cost = 1.0 + penalty * to_double(overflow_prob_exact(law, Rational(0), cap));
  for (const Atom& a : law.atoms) tr.open.emplace_back(target_of(a.value), to_double(a.prob));
  return tr;
}

double expectation_over(const std::vector<std::pair<std::size_t, double>>& row,
                        const std::vector<double>& v) {
  double acc = 0.0;
  for (const auto& [idx, p] : row) acc += p * v[idx];
  return acc;
}

}  // namespace

ValueIterationResult value_iteration(const FiniteDiscrete& law, double penalty,
                                     const Rational& cap, const MdpOptions& opts) {
  ValueIterationResult out;
  out.space = build_state_space(law, cap, opts.max_states);
  const std::size_t n = out.space.states.size();
  const Transitions tr = compile_transitions(out.space, law, penalty, cap);
  std::vector<double> v(n + 1, 0.0), nv(n + 1, 0.0);
  const double g = opts.discount;
  for (std::size_t it = 0; it < opts.max_iters; ++it) {
    const double ev_open = tr.open_cost + g * expectation_over(tr.open, v);
    for (std::size_t i = 0; i < n; ++i) {
      const double ev_cont = tr.cont_cost[i] + g * expectation_over(tr.cont[i], v);
      nv[i] = std::min(ev_cont, ev_open);
    }
    // Over-capacity state: continuing there breaks again with certainty.
    nv[n] = std::min(penalty + g * v[n], ev_open);
    double residual = 0.0;
    for (std::size_t i = 0; i <= n; ++i) residual = std::max(residual, std::abs(nv[i] - v[i]));
    v.swap(nv);
    out.residual_history.push_back(residual);
    out.iterations = it + 1;
    if (residual <= opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.values = std::move(v);
  return out;
}

ThresholdResult extract_threshold(const ValueIterationResult& vi, const FiniteDiscrete& law,
                                  double penalty, const Rational& cap, const MdpOptions& opts) {
  const std::size_t n = vi.space.states.size();
  const Transitions tr = compile_transitions(vi.space, law, penalty, cap);
  const double g = opts.discount;
  const double q_open = tr.open_cost + g * expectation_over(tr.open, vi.values);
  ThresholdResult out;
  out.prefers_continue.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q_cont = tr.cont_cost[i] + g * expectation_over(tr.cont[i], vi.values);
    out.prefers_continue[i] = q_cont <= q_open + opts.tie_tol ? 1 : 0;
  }
  if (n == 0 || !out.prefers_continue[0])
    throw validation_error("empty continue-region: usage 0 must prefer continue");
  std::size_t last = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (out.prefers_continue[i]) last = i;
  for (std::size_t i = 0; i <= last; ++i)
    if (!out.prefers_continue[i])
      throw validation_error("continue-region is not downward closed in usage");
  out.alpha_index = last;
  out.alpha = vi.space.states[last];
  out.iterations = vi.iterations;
  out.converged = vi.converged;
  out.residual_history = vi.residual_history;
  out.values = vi.values;
  out.space = vi.space;
  return out;
}

ThresholdResult mdp_threshold_for(const FiniteDiscrete& law, double penalty,
                                  const MdpOptions& opts, const Rational& cap) {
  ValueIterationResult vi = value_iteration(law, penalty, cap, opts);
  if (!vi.converged)
    throw resource_cap_error("value iteration did not reach residual " +
                             std::to_string(opts.tol) + " in " +
                             std::to_string(opts.max_iters) + " sweeps");
  return extract_threshold(vi, law, penalty, cap, opts);
}

}  // namespace abp
