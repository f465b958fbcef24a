#pragma once

#include "abp/instance.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace abp {

// ---------------------------------------------------------------------------
// Named instance families used by the experiment harness.
//
// Every generator is deterministic given its parameters: an Instance is a
// sequence of size laws, and randomness enters only when episodes sample
// sizes. C denotes the overflow penalty; capacity is always 1.
//
//   three_point             i.i.d. {0 w.p. 1-1/C, 2/5 w.p. 1/2C, 61/100 w.p. 1/2C}
//   bernoulli               i.i.d. {0, 1} with P(1) = 1/C
//   example1                i.i.d. {1/n w.p. 1-1/C, 1 w.p. 1/C}
//   example3                i.i.d. {0 w.p. 1-1/C, alpha w.p. 1/2C, 1-alpha/2 w.p. 1/2C}
//   example4                i.i.d. {1/n w.p. 1-1/C^2, 1 w.p. 1/C^2}
//   concluding_alternating  item 1 is a point mass at 1/n; items at even
//                           positions are Bernoulli(1/C) on {0,1}; items at odd
//                           positions >= 3 are {1/n w.p. 1-1/C^2, 1 w.p. 1/C^2}
//   exp_increasing          Exp(rate_i), rate_i = (1 + 2(i-1)/(n-1)) ln C
//   exp_decreasing          Exp(rate_i), rate_i = (3 - 2(i-1)/(n-1)) ln C
//   exp_blocks              three equal sections with rates ln C, 2 ln C, ln C
//   exp_lower_bound         n1 blocks, each k = ceil(3*eps*mu) items of rate mu
//                           followed by one item of rate lambda, where
//                           beta = 6*n1*ln C/eps, mu = beta*ln C,
//                           lambda = (1+eps)*ln C. Requires eps*ln C >= 4.
// ---------------------------------------------------------------------------

struct GenParams {
  std::size_t n = 0;                // sequence length (derived for exp_lower_bound)
  Rational penalty = Rational(50);  // C
  std::optional<Rational> alpha;    // example3 only, in (0, 1)
  std::size_t n1 = 0;               // exp_lower_bound only
  double eps = 0.0;                 // exp_lower_bound only
};

std::vector<std::string> generator_names();

// Throws validation_error for unknown names or invalid parameters.
Instance gen_named(const std::string& name, const GenParams& params);

// Derived parameters of the exp_lower_bound family, exposed so tests and
// reports can state the bounds they check.
struct LowerBoundShape {
  double beta = 0;    // 6*n1*ln C / eps
  double mu = 0;      // beta*ln C
  double lambda = 0;  // (1+eps)*ln C
  std::size_t k = 0;  // ceil(3*eps*mu), items of rate mu per block
  std::size_t n = 0;  // n1*(k+1) items in total
};
LowerBoundShape lower_bound_shape(std::size_t n1, double eps, const Rational& penalty);

// ---------------------------------------------------------------------------
// CNF formulas (for the counting reduction).
//
// Literals are signed 1-based variable indices: +i means x_i, -i its negation.
// Clauses may repeat a literal; padded clauses use repetition to reach a
// target width, and per-clause occurrence counts feed the digit encoding of
// the reduction.
// ---------------------------------------------------------------------------

struct Cnf {
  int n_vars = 0;
  std::vector<std::vector<int>> clauses;

  void validate() const;  // throws validation_error on out-of-range literals
};

// Evaluate under the assignment where bit (i-1) of `mask` is the value of x_i.
bool cnf_eval(const Cnf& f, std::uint32_t mask);

// Exact satisfying-assignment count by enumeration; requires n_vars <= 24.
std::uint64_t count_sat_bruteforce(const Cnf& f);

// Exhaustive check that f(x) == f(complement of x) for all assignments.
bool cnf_is_symmetric(const Cnf& f);

// Width-2 input (two distinct variables per clause) over n variables ->
// symmetric width-4 output over n+1 variables (the fresh switch variable is
// appended as index n+1). The output conjoins three clause groups:
//   (I)  per input clause K:        (x_{n+1} v x_{n+1} v K)
//   (II) per input clause K:        (!x_{n+1} v !x_{n+1} v K with every
//                                    literal complemented)
//   (III) per ordered clause pair (K, K'): (K v K' with K' complemented)
// Clauses containing a literal and its complement are dropped (they are
// always true). The satisfying-assignment count exactly doubles, and no
// variable occurs more than twice in any output clause.
Cnf symmetrize_2cnf(const Cnf& f);

// DIMACS cnf format ("p cnf <vars> <clauses>", clauses terminated by 0).
Cnf parse_dimacs(const std::string& text);
std::string cnf_to_dimacs(const Cnf& f);

}  // namespace abp
