#pragma once

#include "abp/distribution.hpp"
#include "abp/rational.hpp"

#include <cstddef>
#include <vector>

namespace abp {

// Single-active-bin control problem for an i.i.d. finite law: the state is the
// current bin's usage (exact reachable sums <= cap, ascending) plus one
// absorbing over-capacity state addressed as index states.size().
struct MdpStateSpace {
  std::vector<Rational> states;
  std::size_t top() const { return states.size(); }
};

struct MdpOptions {
  double discount = 0.999;
  double tol = 1e-10;        // sup-norm Bellman residual target
  std::size_t max_iters = 200000;
  std::size_t max_states = 200000;
  double tie_tol = 1e-9;     // |Qc - Qo| below this counts as a tie -> continue
};

MdpStateSpace build_state_space(const FiniteDiscrete& law, const Rational& cap,
                                std::size_t max_states);

struct ValueIterationResult {
  MdpStateSpace space;
  std::vector<double> values;  // size states+1; last = over-capacity state
  std::vector<double> residual_history;
  std::size_t iterations = 0;
  bool converged = false;
};

// Discounted value iteration for the two actions
//   continue: cost C * P(X + s > cap), next state (s + X) (absorbing once > cap)
//   open:     cost 1 + C * P(X > cap), next state X
// starting from V = 0, synchronous sweeps.
ValueIterationResult value_iteration(const FiniteDiscrete& law, double penalty,
                                     const Rational& cap, const MdpOptions& opts);

struct ThresholdResult {
  Rational alpha;                     // largest usage still preferring continue
  std::size_t alpha_index = 0;
  std::vector<char> prefers_continue; // per non-absorbing state
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;
  std::vector<double> values;
  MdpStateSpace space;
};

// Reads the continue-region off the converged values. The region must be a
// downward-closed prefix of the state list (it is, up to tie_tol, because the
// continue value is monotone in usage while the open value is constant);
// anything else is reported as an error.
ThresholdResult extract_threshold(const ValueIterationResult& vi, const FiniteDiscrete& law,
                                  double penalty, const Rational& cap, const MdpOptions& opts);

// build_state_space + value_iteration + extract_threshold in one call.
ThresholdResult mdp_threshold_for(const FiniteDiscrete& law, double penalty,
                                  const MdpOptions& opts, const Rational& cap = Rational(1));

}  // namespace abp
