#include "abp/distribution.hpp"

#include "abp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace abp {

SizeDistribution SizeDistribution::finite(std::vector<Atom> atoms) {
  if (atoms.empty()) throw validation_error("finite law needs at least one atom");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.value < y.value; });
  std::vector<Atom> merged;
  for (auto& a : atoms) {
    if (a.value < 0) throw validation_error("negative atom value");
    if (a.prob <= 0) throw validation_error("atom probability must be positive");
    if (!merged.empty() && merged.back().value == a.value) {
      merged.back().prob += a.prob;
    } else {
      merged.push_back(std::move(a));
    }
  }
  Rational total = 0;
  for (const auto& a : merged) total += a.prob;
  if (total != 1) throw validation_error("atom probabilities sum to " + format_rational(total) + ", expected 1");

  auto fd = std::make_shared<FiniteDiscrete>();
  fd->atoms = std::move(merged);
  double cum = 0.0;
  for (const auto& a : fd->atoms) {
    fd->value_d.push_back(to_double(a.value));
    cum += to_double(a.prob);
    fd->cum_d.push_back(cum);
  }
  fd->cum_d.back() = 1.0;  // guard against accumulated rounding
  SizeDistribution d;
  d.fin_ = std::move(fd);
  return d;
}

SizeDistribution SizeDistribution::exponential(double rate) {
  if (!(rate > 0) || !std::isfinite(rate)) throw validation_error("exponential rate must be positive");
  SizeDistribution d;
  d.rate_ = rate;
  return d;
}

bool SizeDistribution::same_law(const SizeDistribution& o) const {
  if (is_finite() != o.is_finite()) return false;
  if (!is_finite()) return rate_ == o.rate_;
  if (fin_ == o.fin_) return true;
  const auto& a = fin_->atoms;
  const auto& b = o.fin_->atoms;
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].value != b[i].value || a[i].prob != b[i].prob) return false;
  }
  return true;
}

Rational overflow_prob_exact(const FiniteDiscrete& d, const Rational& used, const Rational& cap) {
  Rational threshold = cap - used;
  Rational p = 0;
  for (auto it = d.atoms.rbegin(); it != d.atoms.rend(); ++it) {
    if (it->value > threshold) {
      p += it->prob;
    } else {
      break;  // atoms ascending, reverse scan stops at first non-overflow
    }
  }
  return p;
}

double overflow_prob(const SizeDistribution& d, double used, double cap) {
  double threshold = cap - used;
  if (d.is_finite()) {
    const auto& f = d.fin();
    double p = 0.0;
    for (std::size_t i = f.atoms.size(); i-- > 0;) {
      if (f.value_d[i] > threshold) {
        p += i == 0 ? f.cum_d[0] : f.cum_d[i] - f.cum_d[i - 1];
      } else {
        break;
      }
    }
    return p;
  }
  if (threshold <= 0) return 1.0;
  return std::exp(-d.rate() * threshold);
}

Rational truncated_mean_exact(const FiniteDiscrete& d, const Rational& cap) {
  Rational m = 0;
  for (const auto& a : d.atoms) m += a.prob * (a.value < cap ? a.value : cap);
  return m;
}

double truncated_mean(const SizeDistribution& d, double cap) {
  if (d.is_finite()) {
    double m = 0.0, prev = 0.0;
    const auto& f = d.fin();
    for (std::size_t i = 0; i < f.atoms.size(); ++i) {
      double p = f.cum_d[i] - prev;
      prev = f.cum_d[i];
      m += p * std::min(f.value_d[i], cap);
    }
    return m;
  }
  // E[min(X, cap)] for Exp(rate) = (1 - e^{-rate*cap}) / rate
  return (1.0 - std::exp(-d.rate() * cap)) / d.rate();
}

Rational mean_exact(const FiniteDiscrete& d) {
  Rational m = 0;
  for (const auto& a : d.atoms) m += a.prob * a.value;
  return m;
}

double mean(const SizeDistribution& d) {
  if (d.is_finite()) return to_double(mean_exact(d.fin()));
  return 1.0 / d.rate();
}

Rational tail_above_exact(const FiniteDiscrete& d, const Rational& cap) {
  return overflow_prob_exact(d, Rational(0), cap);
}

std::size_t quantile_index(const FiniteDiscrete& d, double u) {
  // First index with cum > u; u in [0,1).
  auto it = std::upper_bound(d.cum_d.begin(), d.cum_d.end(), u);
  if (it == d.cum_d.end()) --it;
  return static_cast<std::size_t>(it - d.cum_d.begin());
}

double sample(const SizeDistribution& d, Rng& rng) {
  if (d.is_finite()) {
    const auto& f = d.fin();
    return f.value_d[quantile_index(f, rng.next_double())];
  }
  return rng.exponential(d.rate());
}

}  // namespace abp
