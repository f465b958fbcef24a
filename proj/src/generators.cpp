#include "abp/generators.hpp"

#include "abp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <string>
#include <utility>

namespace abp {

namespace {

SizeDistribution finite1(Rational v) {
  return SizeDistribution::finite({{std::move(v), Rational(1)}});
}

SizeDistribution finite2(Rational v0, Rational p0, Rational v1, Rational p1) {
  return SizeDistribution::finite({{std::move(v0), std::move(p0)}, {std::move(v1), std::move(p1)}});
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw validation_error(msg);
}

double ln_penalty(const Rational& penalty) {
  const double c = to_double(penalty);
  if (!(c > 1)) throw validation_error("exponential families need C > 1");
  return std::log(c);
}

Instance iid(std::size_t n, SizeDistribution law, Rational penalty) {
  Instance inst;
  inst.items.assign(n, law);
  inst.penalty = std::move(penalty);
  inst.validate();
  return inst;
}

}  // namespace

std::vector<std::string> generator_names() {
  return {"three_point",    "bernoulli",      "example1",   "example3",
          "example4",       "exp_increasing", "exp_decreasing", "exp_blocks",
          "exp_lower_bound", "concluding_alternating"};
}

LowerBoundShape lower_bound_shape(std::size_t n1, double eps, const Rational& penalty) {
  const double logc = ln_penalty(penalty);
  require(n1 >= 1, "exp_lower_bound needs n1 >= 1");
  require(eps > 0, "exp_lower_bound needs eps > 0");
  require(eps * logc >= 4, "exp_lower_bound needs eps*ln(C) >= 4");
  LowerBoundShape s;
  s.beta = 6.0 * static_cast<double>(n1) * logc / eps;
  s.mu = s.beta * logc;
  s.lambda = (1.0 + eps) * logc;
  s.k = static_cast<std::size_t>(std::ceil(3.0 * eps * s.mu));
  s.n = n1 * (s.k + 1);
  return s;
}

Instance gen_named(const std::string& name, const GenParams& params) {
  const Rational& c = params.penalty;
  require(c >= 1, "penalty C must be >= 1");
  const std::size_t n = params.n;

  if (name == "three_point") {
    require(n >= 1, "three_point needs n >= 1");
    require(c > 1, "three_point needs C > 1");
    const Rational half_c = Rational(1) / (2 * c);
    return iid(n,
               SizeDistribution::finite({{Rational(0), 1 - 2 * half_c},
                                         {Rational(2, 5), half_c},
                                         {Rational(61, 100), half_c}}),
               c);
  }
  if (name == "bernoulli") {
    require(n >= 1, "bernoulli needs n >= 1");
    require(c > 1, "bernoulli needs C > 1");
    return iid(n, finite2(Rational(0), 1 - Rational(1) / c, Rational(1), Rational(1) / c), c);
  }
  if (name == "example1") {
    require(n >= 1, "example1 needs n >= 1");
    require(c > 1, "example1 needs C > 1");
    return iid(n, finite2(Rational(1, n), 1 - Rational(1) / c, Rational(1), Rational(1) / c), c);
  }
  if (name == "example3") {
    require(n >= 1, "example3 needs n >= 1");
    require(c > 1, "example3 needs C > 1");
    require(params.alpha.has_value(), "example3 needs alpha");
    const Rational& a = *params.alpha;
    require(a > 0 && a < 1, "example3 needs alpha in (0, 1)");
    const Rational half_c = Rational(1) / (2 * c);
    return iid(n,
               SizeDistribution::finite({{Rational(0), 1 - 2 * half_c},
                                         {a, half_c},
                                         {1 - a / 2, half_c}}),
               c);
  }
  if (name == "example4") {
    require(n >= 1, "example4 needs n >= 1");
    require(c > 1, "example4 needs C > 1");
    const Rational p = Rational(1) / (c * c);
    return iid(n, finite2(Rational(1, n), 1 - p, Rational(1), p), c);
  }
  if (name == "concluding_alternating") {
    require(n >= 1, "concluding_alternating needs n >= 1");
    require(c > 1, "concluding_alternating needs C > 1");
    Instance inst;
    inst.penalty = c;
    const Rational psq = Rational(1) / (c * c);
    const SizeDistribution even = finite2(Rational(0), 1 - Rational(1) / c, Rational(1), Rational(1) / c);
    const SizeDistribution odd = finite2(Rational(1, n), 1 - psq, Rational(1), psq);
    inst.items.push_back(finite1(Rational(1, n)));
    for (std::size_t i = 2; i <= n; ++i) inst.items.push_back(i % 2 == 0 ? even : odd);
    inst.validate();
    return inst;
  }
  if (name == "exp_increasing" || name == "exp_decreasing") {
    require(n >= 2, name + " needs n >= 2");
    const double logc = ln_penalty(c);
    Instance inst;
    inst.penalty = c;
    for (std::size_t i = 1; i <= n; ++i) {
      const double frac = 2.0 * static_cast<double>(i - 1) / static_cast<double>(n - 1);
      const double mult = name == "exp_increasing" ? 1.0 + frac : 3.0 - frac;
      inst.items.push_back(SizeDistribution::exponential(mult * logc));
    }
    inst.validate();
    return inst;
  }
  if (name == "exp_blocks") {
    require(n >= 3, "exp_blocks needs n >= 3");
    const double logc = ln_penalty(c);
    const std::size_t b = n / 3;
    Instance inst;
    inst.penalty = c;
    for (std::size_t i = 0; i < n; ++i) {
      const bool middle = i >= b && i < 2 * b;
      inst.items.push_back(SizeDistribution::exponential(middle ? 2.0 * logc : logc));
    }
    inst.validate();
    return inst;
  }
  if (name == "exp_lower_bound") {
    const LowerBoundShape s = lower_bound_shape(params.n1, params.eps, c);
    Instance inst;
    inst.penalty = c;
    const SizeDistribution fast = SizeDistribution::exponential(s.mu);
    const SizeDistribution slow = SizeDistribution::exponential(s.lambda);
    for (std::size_t block = 0; block < params.n1; ++block) {
      for (std::size_t i = 0; i < s.k; ++i) inst.items.push_back(fast);
      inst.items.push_back(slow);
    }
    inst.validate();
    return inst;
  }
  throw validation_error("unknown generator name: " + name);
}

// ---------------------------------------------------------------------------
// CNF machinery
// ---------------------------------------------------------------------------

void Cnf::validate() const {
  require(n_vars >= 0, "negative variable count");
  for (const auto& clause : clauses) {
    require(!clause.empty(), "empty clause");
    for (int lit : clause) {
      require(lit != 0 && std::abs(lit) <= n_vars, "literal out of range");
    }
  }
}

bool cnf_eval(const Cnf& f, std::uint32_t mask) {
  for (const auto& clause : f.clauses) {
    bool sat = false;
    for (int lit : clause) {
      const int v = std::abs(lit) - 1;
      const bool val = (mask >> v) & 1u;
      if ((lit > 0) == val) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

std::uint64_t count_sat_bruteforce(const Cnf& f) {
  f.validate();
  if (f.n_vars > 24) throw resource_cap_error("count_sat_bruteforce supports at most 24 variables");
  std::uint64_t count = 0;
  const std::uint32_t top = f.n_vars >= 32 ? 0 : (1u << f.n_vars);
  for (std::uint32_t mask = 0; mask < top; ++mask) {
    if (cnf_eval(f, mask)) ++count;
  }
  return count;
}

bool cnf_is_symmetric(const Cnf& f) {
  f.validate();
  if (f.n_vars > 24) throw resource_cap_error("symmetry check supports at most 24 variables");
  const std::uint32_t top = 1u << f.n_vars;
  const std::uint32_t all = top - 1;
  for (std::uint32_t mask = 0; mask < top; ++mask) {
    if (cnf_eval(f, mask) != cnf_eval(f, all & ~mask)) return false;
  }
  return true;
}

namespace {

bool trivially_true(const std::vector<int>& clause) {
  for (int a : clause) {
    for (int b : clause) {
      if (a == -b) return true;
    }
  }
  return false;
}

}  // namespace

Cnf symmetrize_2cnf(const Cnf& f) {
  f.validate();
  for (const auto& clause : f.clauses) {
    require(clause.size() == 2, "symmetrize_2cnf needs width-2 clauses");
    require(std::abs(clause[0]) != std::abs(clause[1]),
            "symmetrize_2cnf needs two distinct variables per clause");
  }
  const int sw = f.n_vars + 1;  // fresh switch variable
  Cnf out;
  out.n_vars = sw;
  auto push = [&out](std::vector<int> clause) {
    if (!trivially_true(clause)) out.clauses.push_back(std::move(clause));
  };
  for (const auto& k : f.clauses) push({sw, sw, k[0], k[1]});
  for (const auto& k : f.clauses) push({-sw, -sw, -k[0], -k[1]});
  for (const auto& kj : f.clauses) {
    for (const auto& kk : f.clauses) push({kj[0], kj[1], -kk[0], -kk[1]});
  }
  out.validate();
  return out;
}

Cnf parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Cnf f;
  bool seen_header = false;
  std::vector<int> pending;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c") continue;
    if (first == "p") {
      std::string kind;
      long vars = 0, clauses = 0;
      if (!(ls >> kind >> vars >> clauses) || kind != "cnf" || vars < 0) {
        throw validation_error("malformed DIMACS header");
      }
      f.n_vars = static_cast<int>(vars);
      seen_header = true;
      continue;
    }
    require(seen_header, "DIMACS clauses before header");
    ls.clear();
    ls.str(line);
    int lit = 0;
    while (ls >> lit) {
      if (lit == 0) {
        require(!pending.empty(), "empty DIMACS clause");
        f.clauses.push_back(pending);
        pending.clear();
      } else {
        pending.push_back(lit);
      }
    }
  }
  require(pending.empty(), "DIMACS clause missing terminating 0");
  f.validate();
  return f;
}

std::string cnf_to_dimacs(const Cnf& f) {
  std::ostringstream out;
  out << "p cnf " << f.n_vars << ' ' << f.clauses.size() << '\n';
  for (const auto& clause : f.clauses) {
    for (int lit : clause) out << lit << ' ';
    out << "0\n";
  }
  return out.str();
}

}  // namespace abp
