#include <doctest.h>

#include "abp/errors.hpp"
#include "abp/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

using namespace abp;

namespace {

GenParams basic(std::size_t n, int penalty) {
  GenParams p;
  p.n = n;
  p.penalty = Rational(penalty);
  return p;
}

void check_atoms(const SizeDistribution& law,
                 const std::vector<std::pair<Rational, Rational>>& expect) {
  REQUIRE(law.is_finite());
  const auto& atoms = law.fin().atoms;
  REQUIRE(atoms.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(atoms[i].value == expect[i].first);
    CHECK(atoms[i].prob == expect[i].second);
  }
}

}  // namespace

TEST_CASE("generator registry") {
  auto names = generator_names();
  CHECK(names.size() == 10);
  for (const char* want : {"three_point", "bernoulli", "example1", "example3", "example4",
                           "concluding_alternating", "exp_increasing", "exp_decreasing",
                           "exp_blocks", "exp_lower_bound"}) {
    CHECK(std::find(names.begin(), names.end(), want) != names.end());
  }
  CHECK_THROWS_AS(gen_named("no_such_family", basic(3, 50)), Error);
  GenParams bad = basic(3, 50);
  bad.penalty = Rational(1, 2);
  CHECK_THROWS_AS(gen_named("three_point", bad), Error);
}

TEST_CASE("finite iid families have the advertised laws") {
  Instance tp = gen_named("three_point", basic(4, 50));
  CHECK(tp.size() == 4);
  CHECK(tp.penalty == Rational(50));
  CHECK(tp.iid());
  check_atoms(tp.items[0], {{Rational(0), Rational(49, 50)},
                            {Rational(2, 5), Rational(1, 100)},
                            {Rational(61, 100), Rational(1, 100)}});

  Instance bern = gen_named("bernoulli", basic(3, 10));
  check_atoms(bern.items[0], {{Rational(0), Rational(9, 10)}, {Rational(1), Rational(1, 10)}});

  Instance ex1 = gen_named("example1", basic(5, 10));
  check_atoms(ex1.items[0], {{Rational(1, 5), Rational(9, 10)}, {Rational(1), Rational(1, 10)}});

  GenParams p3 = basic(3, 10);
  p3.alpha = Rational(1, 3);
  Instance ex3 = gen_named("example3", p3);
  check_atoms(ex3.items[0], {{Rational(0), Rational(9, 10)},
                             {Rational(1, 3), Rational(1, 20)},
                             {Rational(5, 6), Rational(1, 20)}});
  CHECK_THROWS_AS(gen_named("example3", basic(3, 10)), Error);  // alpha required
  p3.alpha = Rational(1);
  CHECK_THROWS_AS(gen_named("example3", p3), Error);  // alpha in (0, 1)

  Instance ex4 = gen_named("example4", basic(5, 10));
  check_atoms(ex4.items[0],
              {{Rational(1, 5), Rational(99, 100)}, {Rational(1), Rational(1, 100)}});
}

TEST_CASE("concluding_alternating interleaves three laws by position") {
  Instance inst = gen_named("concluding_alternating", basic(5, 10));
  REQUIRE(inst.size() == 5);
  check_atoms(inst.items[0], {{Rational(1, 5), Rational(1)}});
  for (std::size_t even_pos : {std::size_t(1), std::size_t(3)}) {  // 1-based 2 and 4
    check_atoms(inst.items[even_pos],
                {{Rational(0), Rational(9, 10)}, {Rational(1), Rational(1, 10)}});
  }
  for (std::size_t odd_pos : {std::size_t(2), std::size_t(4)}) {  // 1-based 3 and 5
    check_atoms(inst.items[odd_pos],
                {{Rational(1, 5), Rational(99, 100)}, {Rational(1), Rational(1, 100)}});
  }
  CHECK_FALSE(inst.iid());
}

TEST_CASE("exponential schedules carry the advertised rates") {
  const double logc = std::log(50.0);
  Instance up = gen_named("exp_increasing", basic(3, 50));
  REQUIRE(up.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(up.items[i].is_finite() == false);
    // Multipliers 1, 2, 3 are exact doubles at n = 3, so equality is exact.
    CHECK(up.items[i].rate() == static_cast<double>(i + 1) * logc);
  }
  Instance down = gen_named("exp_decreasing", basic(3, 50));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(down.items[i].rate() == static_cast<double>(3 - i) * logc);
  }
  CHECK_THROWS_AS(gen_named("exp_increasing", basic(1, 50)), Error);

  Instance blocks = gen_named("exp_blocks", basic(9, 50));
  REQUIRE(blocks.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) {
    const double want = (i >= 3 && i < 6) ? 2.0 * logc : logc;
    CHECK(blocks.items[i].rate() == want);
  }
  CHECK_THROWS_AS(gen_named("exp_blocks", basic(2, 50)), Error);
}

TEST_CASE("exp_lower_bound shape and structure") {
  GenParams p;
  p.n1 = 2;
  p.eps = 1.0;
  p.penalty = Rational(60);  // ln 60 > 4, so eps * ln C >= 4 holds
  LowerBoundShape s = lower_bound_shape(p.n1, p.eps, p.penalty);
  const double logc = std::log(60.0);
  CHECK(s.beta == doctest::Approx(6.0 * 2 * logc / 1.0).epsilon(1e-14));
  CHECK(s.mu == doctest::Approx(s.beta * logc).epsilon(1e-14));
  CHECK(s.lambda == doctest::Approx(2.0 * logc).epsilon(1e-14));
  CHECK(s.k == static_cast<std::size_t>(std::ceil(3.0 * s.mu)));
  CHECK(s.n == p.n1 * (s.k + 1));

  Instance inst = gen_named("exp_lower_bound", p);
  REQUIRE(inst.size() == s.n);
  for (std::size_t block = 0; block < p.n1; ++block) {
    const std::size_t base = block * (s.k + 1);
    for (std::size_t i = 0; i < s.k; ++i) CHECK(inst.items[base + i].rate() == s.mu);
    CHECK(inst.items[base + s.k].rate() == s.lambda);
  }

  // eps * ln C < 4 must be rejected.
  CHECK_THROWS_AS(lower_bound_shape(2, 0.5, Rational(50)), Error);
  GenParams bad = p;
  bad.eps = 0.5;
  bad.penalty = Rational(50);
  CHECK_THROWS_AS(gen_named("exp_lower_bound", bad), Error);
}

TEST_CASE("cnf evaluation and exact counting") {
  Cnf f;
  f.n_vars = 2;
  f.clauses = {{1, -2}};
  CHECK(cnf_eval(f, 0b00));
  CHECK(cnf_eval(f, 0b01));
  CHECK_FALSE(cnf_eval(f, 0b10));
  CHECK(cnf_eval(f, 0b11));
  CHECK(count_sat_bruteforce(f) == 3);

  Cnf g;
  g.n_vars = 2;
  g.clauses = {{1, 2}, {-1, 2}};
  CHECK(count_sat_bruteforce(g) == 2);

  Cnf empty;
  empty.n_vars = 3;
  CHECK(count_sat_bruteforce(empty) == 8);

  Cnf huge;
  huge.n_vars = 25;
  CHECK_THROWS_AS(count_sat_bruteforce(huge), Error);

  Cnf badlit;
  badlit.n_vars = 1;
  badlit.clauses = {{2}};
  CHECK_THROWS_AS(count_sat_bruteforce(badlit), Error);
}

TEST_CASE("symmetrization doubles the count and meets the shape contract") {
  auto check_sym = [](const Cnf& f) {
    Cnf g = symmetrize_2cnf(f);
    CHECK(g.n_vars == f.n_vars + 1);
    CHECK(cnf_is_symmetric(g));
    CHECK(count_sat_bruteforce(g) == 2 * count_sat_bruteforce(f));
    for (const auto& clause : g.clauses) {
      CHECK(clause.size() == 4);
      // No variable occurs more than twice in one clause.
      for (int lit : clause) {
        int occ = 0;
        for (int other : clause) occ += std::abs(other) == std::abs(lit);
        CHECK(occ <= 2);
      }
    }
    return g;
  };

  Cnf one;  // (x1 v x2): pair clauses from group III are trivially true
  one.n_vars = 2;
  one.clauses = {{1, 2}};
  Cnf g1 = check_sym(one);
  CHECK(g1.clauses.size() == 2);
  CHECK(count_sat_bruteforce(g1) == 6);
  CHECK_FALSE(cnf_is_symmetric(one));

  Cnf two;  // shared variable: all ordered pairs collapse
  two.n_vars = 2;
  two.clauses = {{1, 2}, {-1, 2}};
  Cnf g2 = check_sym(two);
  CHECK(g2.clauses.size() == 4);

  Cnf disjoint;  // disjoint clauses keep both ordered pair clauses
  disjoint.n_vars = 4;
  disjoint.clauses = {{1, 2}, {3, 4}};
  Cnf g3 = check_sym(disjoint);
  CHECK(g3.clauses.size() == 6);
  CHECK(count_sat_bruteforce(g3) == 18);

  Cnf wide;
  wide.n_vars = 3;
  wide.clauses = {{1, 2, 3}};
  CHECK_THROWS_AS(symmetrize_2cnf(wide), Error);
  Cnf dup;
  dup.n_vars = 2;
  dup.clauses = {{1, -1}};
  CHECK_THROWS_AS(symmetrize_2cnf(dup), Error);
}

TEST_CASE("dimacs parsing and emission") {
  const std::string text =
      "c a comment line\n"
      "p cnf 3 2\n"
      "1 -2 0\n"
      "2 3 -1 0\n";
  Cnf f = parse_dimacs(text);
  CHECK(f.n_vars == 3);
  REQUIRE(f.clauses.size() == 2);
  CHECK(f.clauses[0] == std::vector<int>{1, -2});
  CHECK(f.clauses[1] == std::vector<int>{2, 3, -1});

  // Clauses may span lines; the terminating zero delimits them.
  Cnf g = parse_dimacs("p cnf 2 1\n1\n-2 0\n");
  REQUIRE(g.clauses.size() == 1);
  CHECK(g.clauses[0] == std::vector<int>{1, -2});

  // Round trip through the emitter.
  Cnf back = parse_dimacs(cnf_to_dimacs(f));
  CHECK(back.n_vars == f.n_vars);
  CHECK(back.clauses == f.clauses);

  CHECK_THROWS_AS(parse_dimacs("1 2 0\n"), Error);             // clause before header
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 2\n"), Error);    // missing terminator
  CHECK_THROWS_AS(parse_dimacs("p dnf 2 1\n1 2 0\n"), Error);  // wrong format tag
  CHECK_THROWS_AS(parse_dimacs("p cnf 1 1\n1 2 0\n"), Error);  // literal out of range
}
