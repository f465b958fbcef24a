#pragma once

#include "abp/generators.hpp"
#include "abp/instance.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace abp {

// ---------------------------------------------------------------------------
// Counting reduction: encodes a symmetric width-4 CNF formula as a packing
// instance whose optimal expected cost determines the satisfying-assignment
// count.
//
// Items are base-10 integers read as digit blocks, most significant first:
//
//   [n variable digits][n mirror digits][2n equivalence digits][m clause digits]
//
// The equivalence block alternates a positive and a negative digit per
// variable. The capacity is B = 1..1|1..1|1..1|4..4, and every sum a feasible
// packing can form keeps each digit below 10, so numeric comparisons against
// B decompose digit-by-digit (no carries).
//
// Per variable i there are two random "chooser" items, each uniform over two
// outcomes: the true-outcome (variable digit + negative equivalence digit,
// read as "x_i = 1") and the false-outcome (variable digit + positive
// equivalence digit, "x_i = 0"). Per variable there are two deterministic
// witness items: the true-witness (mirror digit + positive equivalence digit
// + clause digits counting occurrences of x_i) and the false-witness (mirror
// digit + negative equivalence digit + occurrences of the negated literal).
// Per clause there are three slack items worth one clause digit each, and one
// final closer item worth one unit in every clause digit.
// ---------------------------------------------------------------------------

enum class ReductionRole {
  chooser,        // random item packed while the assignment is being revealed
  chooser_twin,   // its independent copy with the same two-point law
  witness_true,   // deterministic witness carrying occurrences of x_i
  witness_false,  // deterministic witness carrying occurrences of the negation
  clause_slack,   // one clause digit (three copies per clause)
  closer,         // one unit in every clause digit (last item)
};

struct ReductionTag {
  ReductionRole role = ReductionRole::closer;
  int index = 0;  // 1-based variable index (choosers/witnesses) or clause index (slack)
  int slot = 0;   // 0..2 among a clause's slack items
};

// Digit positions as powers of ten (1-based variable/clause indices).
int reduction_total_digits(int n, int m);
int var_digit_power(int n, int m, int i);
int mirror_digit_power(int n, int m, int i);
int pos_equiv_digit_power(int n, int m, int i);
int neg_equiv_digit_power(int n, int m, int i);
int clause_digit_power(int n, int m, int j);

// Digit of an integer-valued rational at the given power of ten.
int digit_at(const Rational& value, int power);

struct ReductionArtifacts {
  Instance instance;               // capacity B, configurable penalty
  Cnf formula;                     // the encoded symmetric width-4 formula
  std::vector<ReductionTag> tags;  // parallel to instance.items
  int n = 0;                       // variables
  int m = 0;                       // clauses

  Rational capacity() const { return instance.capacity; }
  // Chooser outcomes for variable i (1-based).
  Rational value_true(int i) const;
  Rational value_false(int i) const;
};

// Item order: chooser_1, twin_1, ..., chooser_n, twin_n, then
// witness_true_1, witness_false_1, ..., witness_true_n, witness_false_n,
// then the three slack items of clause 1, ..., clause m, then the closer.
//
// Requires: width exactly 4, formula symmetric (f(x) == f(!x) for all x,
// checked exhaustively), every variable occurring at most twice per clause,
// penalty > 2. Throws validation_error otherwise.
ReductionArtifacts reduction_instance(const Cnf& symmetric_width4,
                                      const Rational& penalty = Rational(10));

// Closed-form predicted optimum for n variables and sat-count s:
// 5/2 - 2/2^n - s/2^(2n). Requires 0 <= s <= 2^n.
Rational reduction_value(int n_vars, std::uint64_t sat_count);

// Exact minimum expected cost over policies with the forced opening structure
// (chooser_i -> bin 1, twin_i -> bin 2) that never break a bin; every
// assignment of the deterministic items is searched with memoization on
// (time, sorted usages). Branches that would break a bin are pruned: with
// penalty > 2 a break is never cheaper than the extra bin it avoids.
// Throws resource_cap_error beyond the size guards.
Rational restricted_policy_search(const ReductionArtifacts& art,
                                  std::size_t max_states = 4'000'000);

// Exact expected cost of the explicit collision-adaptive policy (the
// constructive upper bound): choosers stream into bins 1 and 2; after the
// first collision on a false-outcome everything else retreats to bin 3;
// after a first collision on a true-outcome the witnesses complete bins 1
// and 2 using bin 2's freed digit; with no collision the witnesses follow
// the revealed assignment and the closer fits into two bins exactly when the
// assignment satisfies the formula. Every placement is verified against the
// capacity; a logic_error is thrown if the construction would break a bin.
Rational reduction_reference_value(const ReductionArtifacts& art);

}  // namespace abp
