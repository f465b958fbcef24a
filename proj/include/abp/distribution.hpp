#pragma once

#include "abp/rational.hpp"
#include "abp/rng.hpp"

#include <memory>
#include <vector>

namespace abp {

// One support point of a finite item-size law.
struct Atom {
  Rational value;  // size, >= 0
  Rational prob;   // probability, > 0; atom probabilities sum to exactly 1
};

// Finite discrete law. Atoms are sorted ascending by value and duplicate values
// are merged, so the inverse CDF is well defined and two equal laws have equal
// representations. Cached double arrays serve the samplers.
struct FiniteDiscrete {
  std::vector<Atom> atoms;
  std::vector<double> value_d;  // atom values as doubles
  std::vector<double> cum_d;    // cumulative probabilities; back() == 1.0 exactly
};

// Item-size distribution: finite discrete (exact rationals end to end) or
// exponential with a double rate (irrational density; handled in floating point).
class SizeDistribution {
 public:
  SizeDistribution() = default;

  // Validates: nonempty, values >= 0, probs > 0, probs sum to exactly 1.
  // Sorts by value and merges duplicates.
  static SizeDistribution finite(std::vector<Atom> atoms);
  static SizeDistribution exponential(double rate);  // rate > 0

  bool is_finite() const { return fin_ != nullptr; }
  const FiniteDiscrete& fin() const { return *fin_; }
  double rate() const { return rate_; }

  // Identity-level equality (shared representation), used for i.i.d. detection.
  bool same_law(const SizeDistribution& o) const;

 private:
  std::shared_ptr<const FiniteDiscrete> fin_;
  double rate_ = 0.0;
};

// P(X > cap - used): probability that packing X into a bin with the given usage
// overflows capacity `cap` (overflow is strict).
Rational overflow_prob_exact(const FiniteDiscrete& d, const Rational& used, const Rational& cap);
double overflow_prob(const SizeDistribution& d, double used, double cap);

// E[min(X, cap)]
Rational truncated_mean_exact(const FiniteDiscrete& d, const Rational& cap);
double truncated_mean(const SizeDistribution& d, double cap);

Rational mean_exact(const FiniteDiscrete& d);
double mean(const SizeDistribution& d);

// Probability that X exceeds `cap` from an empty bin, exact for finite laws.
Rational tail_above_exact(const FiniteDiscrete& d, const Rational& cap);

// Inverse-CDF sampling. For finite laws the same u always maps to the same atom
// index (atoms ascending), which is what couples an item with its discretized
// versions elsewhere: they share the u.
std::size_t quantile_index(const FiniteDiscrete& d, double u);
double sample(const SizeDistribution& d, Rng& rng);

}  // namespace abp
