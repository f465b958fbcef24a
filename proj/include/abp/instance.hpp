#pragma once

#include "abp/distribution.hpp"
#include "abp/rational.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace abp {

// A packing problem: an ordered sequence of item-size laws, an overflow penalty
// C >= 1 and a bin capacity (default 1). Sizes are revealed only after an item
// is irrevocably placed; a bin whose content sum strictly exceeds the capacity
// breaks, costs C, and is unusable afterwards. Episode cost = bins opened +
// C * bins broken.
struct Instance {
  std::vector<SizeDistribution> items;
  Rational penalty = 50;   // C
  Rational capacity = 1;

  std::size_t size() const { return items.size(); }
  bool all_finite() const;
  bool iid() const;  // every item shares one law (true for n <= 1)

  void validate() const;  // penalty >= 1, capacity > 0, nonempty
};

// JSON serialization. Rationals are written as exact "p/q" strings, exponential
// rates as shortest-round-trip decimal strings. Consecutive identical items are
// run-length compressed with a "repeat" field; parsing expands them, so exact
// round-trips hold for arbitrarily long i.i.d. blocks.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);
void save_instance(const Instance& inst, const std::string& path);
Instance load_instance(const std::string& path);

// FNV-1a digest of the canonical JSON form; identifies instances in reports.
std::uint64_t instance_digest(const Instance& inst);

std::string format_double(double x);  // shortest decimal that round-trips

}  // namespace abp
