#include "abp/reduction.hpp"

#include "abp/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace abp {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw validation_error(msg);
}

BigInt pow10_big(int power) {
  return boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(power));
}

Rational digit_value(int power) { return Rational(pow10_big(power)); }

}  // namespace

int reduction_total_digits(int n, int m) { return 4 * n + m; }
int var_digit_power(int n, int m, int i) { return 4 * n + m - i; }
int mirror_digit_power(int n, int m, int i) { return 3 * n + m - i; }
int pos_equiv_digit_power(int n, int m, int i) { return 2 * n + m - 2 * i + 1; }
int neg_equiv_digit_power(int n, int m, int i) { return 2 * n + m - 2 * i; }
int clause_digit_power(int /*n*/, int m, int j) { return m - j; }

int digit_at(const Rational& value, int power) {
  if (denominator(value) != 1 || value < 0) {
    throw validation_error("digit_at expects a nonnegative integer value");
  }
  const BigInt num = numerator(value);
  return static_cast<int>(BigInt((num / pow10_big(power)) % 10));
}

Rational ReductionArtifacts::value_true(int i) const {
  return digit_value(var_digit_power(n, m, i)) + digit_value(neg_equiv_digit_power(n, m, i));
}

Rational ReductionArtifacts::value_false(int i) const {
  return digit_value(var_digit_power(n, m, i)) + digit_value(pos_equiv_digit_power(n, m, i));
}

ReductionArtifacts reduction_instance(const Cnf& formula, const Rational& penalty) {
  formula.validate();
  require(formula.n_vars >= 1, "reduction needs at least one variable");
  require(!formula.clauses.empty(), "reduction needs at least one clause");
  require(penalty > 2, "reduction penalty must exceed 2");
  for (const auto& clause : formula.clauses) {
    require(clause.size() == 4, "reduction needs width-4 clauses");
  }
  require(formula.n_vars <= 20, "reduction symmetry check supports at most 20 variables");
  require(cnf_is_symmetric(formula), "reduction needs a symmetric formula");

  const int n = formula.n_vars;
  const int m = static_cast<int>(formula.clauses.size());

  // occurrences[i-1][j]: count of the positive (first) and negative (second)
  // literal of variable i in clause j+1.
  std::vector<std::vector<std::pair<int, int>>> occ(
      n, std::vector<std::pair<int, int>>(m, {0, 0}));
  for (int j = 0; j < m; ++j) {
    for (int lit : formula.clauses[j]) {
      auto& slot = occ[std::abs(lit) - 1][j];
      (lit > 0 ? slot.first : slot.second) += 1;
    }
    for (int i = 0; i < n; ++i) {
      require(occ[i][j].first + occ[i][j].second <= 2,
              "reduction needs at most two occurrences of a variable per clause");
    }
  }

  ReductionArtifacts art;
  art.formula = formula;
  art.n = n;
  art.m = m;

  auto clause_sum = [&](int i, bool positive) {
    Rational s = 0;
    for (int j = 0; j < m; ++j) {
      const int count = positive ? occ[i - 1][j].first : occ[i - 1][j].second;
      if (count > 0) s += count * digit_value(clause_digit_power(n, m, j + 1));
    }
    return s;
  };

  Instance& inst = art.instance;
  inst.penalty = penalty;
  Rational b_cap = 0;
  for (int i = 1; i <= n; ++i) {
    b_cap += digit_value(var_digit_power(n, m, i));
    b_cap += digit_value(mirror_digit_power(n, m, i));
    b_cap += digit_value(pos_equiv_digit_power(n, m, i));
    b_cap += digit_value(neg_equiv_digit_power(n, m, i));
  }
  for (int j = 1; j <= m; ++j) b_cap += 4 * digit_value(clause_digit_power(n, m, j));
  inst.capacity = b_cap;

  auto point = [](Rational v) {
    return SizeDistribution::finite({{std::move(v), Rational(1)}});
  };
  for (int i = 1; i <= n; ++i) {
    const SizeDistribution chooser = SizeDistribution::finite(
        {{art.value_true(i), Rational(1, 2)}, {art.value_false(i), Rational(1, 2)}});
    inst.items.push_back(chooser);
    art.tags.push_back({ReductionRole::chooser, i, 0});
    inst.items.push_back(chooser);
    art.tags.push_back({ReductionRole::chooser_twin, i, 0});
  }
  for (int i = 1; i <= n; ++i) {
    inst.items.push_back(point(digit_value(mirror_digit_power(n, m, i)) +
                               digit_value(pos_equiv_digit_power(n, m, i)) +
                               clause_sum(i, true)));
    art.tags.push_back({ReductionRole::witness_true, i, 0});
    inst.items.push_back(point(digit_value(mirror_digit_power(n, m, i)) +
                               digit_value(neg_equiv_digit_power(n, m, i)) +
                               clause_sum(i, false)));
    art.tags.push_back({ReductionRole::witness_false, i, 0});
  }
  for (int j = 1; j <= m; ++j) {
    for (int slot = 0; slot < 3; ++slot) {
      inst.items.push_back(point(digit_value(clause_digit_power(n, m, j))));
      art.tags.push_back({ReductionRole::clause_slack, j, slot});
    }
  }
  Rational closer = 0;
  for (int j = 1; j <= m; ++j) closer += digit_value(clause_digit_power(n, m, j));
  inst.items.push_back(point(closer));
  art.tags.push_back({ReductionRole::closer, 0, 0});

  inst.validate();
  return art;
}

Rational reduction_value(int n_vars, std::uint64_t sat_count) {
  require(n_vars >= 1 && n_vars <= 62, "reduction_value needs 1 <= n <= 62");
  const BigInt pow2 = BigInt(1) << n_vars;
  require(BigInt(sat_count) <= pow2, "sat count exceeds 2^n");
  return Rational(5, 2) - Rational(2) / Rational(pow2) -
         Rational(sat_count) / Rational(pow2 * pow2);
}

// ---------------------------------------------------------------------------
// Restricted policy search
// ---------------------------------------------------------------------------

Rational restricted_policy_search(const ReductionArtifacts& art, std::size_t max_states) {
  const int n = art.n;
  const int m = art.m;
  if (n > 4 || m > 16) {
    throw resource_cap_error("restricted_policy_search supports n <= 4 variables, m <= 16 clauses");
  }
  const Rational& cap = art.instance.capacity;
  const auto& items = art.instance.items;
  const std::size_t total = items.size();
  const std::size_t prefix_len = 2 * static_cast<std::size_t>(n);

  // The forced prefix opens bins 1 and 2, and one fresh bin always absorbs
  // the whole deterministic tail: the tail sum's leading variable digit is 0
  // against the capacity's 1 and no digit sum reaches 10, so it is below the
  // capacity. Verified here, because it is what makes the three-bin fallback
  // sound.
  Rational tail_sum = 0;
  for (std::size_t t = prefix_len; t < total; ++t) tail_sum += items[t].fin().atoms[0].value;
  if (tail_sum > cap) {
    throw std::logic_error("restricted_policy_search: tail does not fit a fresh bin");
  }

  // Breaking placements are pruned outright: with penalty > 2, diverting the
  // offending item to a fresh bin is always strictly cheaper than a break.
  // Every extra bin costs exactly 1, so with the three-bin fallback in hand
  // the only question per outcome path is whether the tail fits into bins
  // 1 and 2 alone (cost 2) or not (cost 3): searching deeper bin counts is
  // dominated. The two-bin search memoizes on (time, sorted usages).
  std::map<std::string, bool> memo;
  std::function<bool(std::size_t, const Rational&, const Rational&)> fits_two =
      [&](std::size_t t, const Rational& u1, const Rational& u2) -> bool {
    if (t == total) return true;
    const Rational& lo = u1 <= u2 ? u1 : u2;
    const Rational& hi = u1 <= u2 ? u2 : u1;
    std::ostringstream key;
    key << t << '|' << format_rational(lo) << '|' << format_rational(hi);
    const std::string k = key.str();
    if (const auto it = memo.find(k); it != memo.end()) return it->second;
    if (memo.size() >= max_states) {
      throw resource_cap_error("restricted_policy_search state cap exceeded");
    }
    const Rational& v = items[t].fin().atoms[0].value;
    bool ok = (lo + v <= cap && fits_two(t + 1, lo + v, hi)) ||
              (hi + v <= cap && (lo == hi ? false : fits_two(t + 1, lo, hi + v)));
    memo[k] = ok;
    return ok;
  };

  // Forced prefix: chooser_i into bin 1, its twin into bin 2. Neither bin can
  // break here (their usage stays digit-below the capacity); enforced anyway.
  std::function<Rational(std::size_t, const Rational&, const Rational&)> walk =
      [&](std::size_t t, const Rational& u1, const Rational& u2) -> Rational {
    if (t == prefix_len) {
      return fits_two(t, u1, u2) ? Rational(2) : Rational(3);
    }
    const auto& law = items[t].fin();
    Rational acc = 0;
    for (const auto& atom : law.atoms) {
      Rational w1 = u1, w2 = u2;
      (t % 2 == 0 ? w1 : w2) += atom.value;
      if (w1 > cap || w2 > cap) {
        throw std::logic_error("restricted_policy_search: forced prefix broke a bin");
      }
      acc += atom.prob * walk(t + 1, w1, w2);
    }
    return acc;
  };

  return walk(0, Rational(0), Rational(0));
}

// ---------------------------------------------------------------------------
// Constructive reference policy
// ---------------------------------------------------------------------------

Rational reduction_reference_value(const ReductionArtifacts& art) {
  const int n = art.n;
  const int m = art.m;
  require(n <= 20, "reference policy evaluation supports at most 20 variables");
  const Rational& cap = art.instance.capacity;

  std::vector<Rational> tv(n + 1), fv(n + 1), wt(n + 1), wf(n + 1);
  for (int i = 1; i <= n; ++i) {
    tv[i] = art.value_true(i);
    fv[i] = art.value_false(i);
  }
  std::vector<Rational> slack(m + 1);
  Rational closer;
  for (std::size_t idx = 0; idx < art.tags.size(); ++idx) {
    const ReductionTag& tag = art.tags[idx];
    const Rational& v = art.instance.items[idx].fin().atoms[0].value;
    switch (tag.role) {
      case ReductionRole::witness_true: wt[tag.index] = v; break;
      case ReductionRole::witness_false: wf[tag.index] = v; break;
      case ReductionRole::clause_slack: slack[tag.index] = v; break;
      case ReductionRole::closer: closer = v; break;
      default: break;
    }
  }

  Rational acc = 0;
  const std::uint64_t paths = 1ull << (2 * n);
  for (std::uint64_t path = 0; path < paths; ++path) {
    // Bit 2(i-1) is chooser_i's outcome, bit 2(i-1)+1 its twin's; set = true-outcome.
    const auto outcome1 = [&](int i) { return ((path >> (2 * (i - 1))) & 1ull) != 0; };
    const auto outcome2 = [&](int i) { return ((path >> (2 * (i - 1) + 1)) & 1ull) != 0; };

    int collision = 0;    // first i with equal outcomes, 0 if none
    bool collision_true = false;
    for (int i = 1; i <= n; ++i) {
      if (outcome1(i) == outcome2(i)) {
        collision = i;
        collision_true = outcome1(i);
        break;
      }
    }

    Rational u1 = 0, u2 = 0, u3 = 0;
    bool opened3 = false;
    auto place = [&](int bin, const Rational& v) {
      Rational& u = bin == 1 ? u1 : bin == 2 ? u2 : u3;
      if (bin == 3) opened3 = true;
      u += v;
      if (u > cap) throw std::logic_error("reference policy broke a bin");
    };

    for (int i = 1; i <= n; ++i) {
      place(1, outcome1(i) ? tv[i] : fv[i]);
      place(2, outcome2(i) ? tv[i] : fv[i]);
    }

    if (collision != 0 && !collision_true) {
      // A doubled false-outcome: no two-bin completion exists, retreat to bin 3.
      for (int i = 1; i <= n; ++i) {
        place(3, wt[i]);
        place(3, wf[i]);
      }
      for (int j = 1; j <= m; ++j) {
        place(3, slack[j]);
        place(3, slack[j]);
        place(3, slack[j]);
      }
      place(3, closer);
    } else if (collision != 0) {
      // A doubled true-outcome at `collision`: bin 2's positive equivalence
      // digit is freed there, so bin 2 absorbs everything risky. Bin 1 keeps
      // the witness matching its own chooser outcome.
      for (int i = 1; i < collision; ++i) {
        place(outcome1(i) ? 1 : 2, wt[i]);
        place(outcome1(i) ? 2 : 1, wf[i]);
      }
      place(1, wt[collision]);
      place(2, wf[collision]);
      for (int i = collision + 1; i <= n; ++i) {
        place(outcome1(i) ? 1 : 2, wt[i]);
        place(outcome1(i) ? 2 : 1, wf[i]);
      }
      for (int j = 1; j <= m; ++j) {
        place(2, slack[j]);
        place(2, slack[j]);
        place(2, slack[j]);
      }
      place(2, closer);
    } else {
      // Complementary outcomes reveal an assignment; witnesses follow it.
      for (int i = 1; i <= n; ++i) {
        place(outcome1(i) ? 1 : 2, wt[i]);
        place(outcome1(i) ? 2 : 1, wf[i]);
      }
      // Slack items top bin 1's clause digits up to 4, remainder to bin 2.
      for (int j = 1; j <= m; ++j) {
        const int have = digit_at(u1, clause_digit_power(n, m, j));
        const int to_first = std::min(3, 4 - have);
        for (int s = 0; s < 3; ++s) place(s < to_first ? 1 : 2, slack[j]);
      }
      if (u2 + closer <= cap) {
        place(2, closer);
      } else if (u1 + closer <= cap) {
        place(1, closer);
      } else {
        place(3, closer);
      }
    }

    acc += opened3 ? Rational(3) : Rational(2);
  }
  return acc / Rational(BigInt(paths));
}

}  // namespace abp
