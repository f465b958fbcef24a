#include <doctest.h>

#include "abp/errors.hpp"
#include "abp/instance.hpp"

#include <cstdio>
#include <fstream>
#include <string>

using namespace abp;

namespace {

SizeDistribution point(const Rational& v) {
  return SizeDistribution::finite({{v, Rational(1)}});
}

Instance sample_instance() {
  Instance inst;
  SizeDistribution iidlaw = SizeDistribution::finite({{Rational(0), Rational(49, 50)},
                                                      {Rational(2, 5), Rational(1, 100)},
                                                      {Rational(61, 100), Rational(1, 100)}});
  for (int i = 0; i < 5; ++i) inst.items.push_back(iidlaw);
  inst.items.push_back(point(Rational(1, 3)));
  inst.items.push_back(SizeDistribution::exponential(2.75));
  inst.penalty = Rational(50);
  return inst;
}

}  // namespace

TEST_CASE("all_finite and iid flags") {
  Instance inst = sample_instance();
  CHECK_FALSE(inst.all_finite());
  CHECK_FALSE(inst.iid());
  Instance iid;
  for (int i = 0; i < 3; ++i) iid.items.push_back(point(Rational(1, 2)));
  CHECK(iid.all_finite());
  CHECK(iid.iid());
  Instance one;
  one.items.push_back(SizeDistribution::exponential(1.0));
  CHECK(one.iid());
  CHECK_FALSE(one.all_finite());
}

TEST_CASE("validate rejects bad parameters") {
  Instance empty;
  CHECK_THROWS_AS(empty.validate(), Error);
  Instance inst;
  inst.items.push_back(point(Rational(1, 2)));
  inst.penalty = Rational(1, 2);
  CHECK_THROWS_AS(inst.validate(), Error);
  inst.penalty = Rational(1);
  CHECK_NOTHROW(inst.validate());  // penalty exactly 1 is allowed
  inst.capacity = Rational(0);
  CHECK_THROWS_AS(inst.validate(), Error);
}

TEST_CASE("JSON round-trip preserves every field exactly") {
  Instance inst = sample_instance();
  std::string text = instance_to_json(inst);
  Instance back = instance_from_json(text);
  REQUIRE(back.size() == inst.size());
  CHECK(back.penalty == inst.penalty);
  CHECK(back.capacity == inst.capacity);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    CHECK(back.items[i].same_law(inst.items[i]));
  }
  // Canonical form is stable under a second round trip.
  CHECK(instance_to_json(back) == text);
}

TEST_CASE("identical consecutive items are run-length compressed") {
  Instance inst;
  for (int i = 0; i < 1000; ++i) inst.items.push_back(point(Rational(1, 7)));
  std::string text = instance_to_json(inst);
  CHECK(text.find("\"repeat\": 1000") != std::string::npos);
  CHECK(text.size() < 400);  // compact despite 1000 items
  Instance back = instance_from_json(text);
  REQUIRE(back.size() == 1000);
  CHECK(back.iid());
  CHECK(back.items[999].same_law(inst.items[0]));
}

TEST_CASE("repeat blocks split at law boundaries") {
  Instance inst;
  for (int i = 0; i < 3; ++i) inst.items.push_back(point(Rational(1, 4)));
  for (int i = 0; i < 2; ++i) inst.items.push_back(point(Rational(1, 2)));
  std::string text = instance_to_json(inst);
  CHECK(text.find("\"repeat\": 3") != std::string::npos);
  CHECK(text.find("\"repeat\": 2") != std::string::npos);
  Instance back = instance_from_json(text);
  REQUIRE(back.size() == 5);
  CHECK(back.items[2].same_law(inst.items[0]));
  CHECK(back.items[3].same_law(inst.items[4]));
  CHECK_FALSE(back.items[2].same_law(back.items[3]));
}

TEST_CASE("exponential rates survive the text form bit-exactly") {
  Instance inst;
  inst.items.push_back(SizeDistribution::exponential(3.912023005428146));  // ln(50)
  Instance back = instance_from_json(instance_to_json(inst));
  CHECK(back.items[0].rate() == inst.items[0].rate());
}

TEST_CASE("malformed JSON is a validation error") {
  CHECK_THROWS_AS(instance_from_json("{"), Error);
  CHECK_THROWS_AS(instance_from_json("{}"), Error);
  CHECK_THROWS_AS(instance_from_json(R"({"penalty":"50","items":[]})"), Error);
  CHECK_THROWS_AS(instance_from_json(R"({"penalty":"50","items":[{"kind":"weird"}]})"), Error);
  CHECK_THROWS_AS(
      instance_from_json(
          R"({"penalty":"50","items":[{"kind":"discrete","atoms":[["1/2","1"]],"repeat":0}]})"),
      Error);
  // Atom probabilities must sum to one after expansion too.
  CHECK_THROWS_AS(
      instance_from_json(
          R"({"penalty":"50","items":[{"kind":"discrete","atoms":[["1/2","1/3"]]}]})"),
      Error);
}

TEST_CASE("digest is stable and content-sensitive") {
  Instance a = sample_instance();
  Instance b = sample_instance();
  CHECK(instance_digest(a) == instance_digest(b));
  b.penalty = Rational(49);
  CHECK(instance_digest(a) != instance_digest(b));
  Instance c = instance_from_json(instance_to_json(a));
  CHECK(instance_digest(c) == instance_digest(a));
}

TEST_CASE("save and load through a file") {
  Instance inst = sample_instance();
  std::string path = "test_instance_roundtrip.json";
  save_instance(inst, path);
  Instance back = load_instance(path);
  CHECK(instance_digest(back) == instance_digest(inst));
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_instance("does_not_exist_anywhere.json"), Error);
}

TEST_CASE("format_double round-trips doubles through text") {
  for (double x : {0.1, 1.0 / 3.0, 3.912023005428146, 1e-30, 123456789.123456789}) {
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
}
