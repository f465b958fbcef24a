#pragma once

#include "abp/distribution.hpp"
#include "abp/engine.hpp"
#include "abp/instance.hpp"
#include "abp/rng.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace abp {

// ---------------------------------------------------------------------------
// Two-step size discretization with soft capacities.
//
// Step 1 replaces each item's mass at values <= small_cut by a mean-preserving
// two-point law on {0, small_cut}; step 2 rounds the remaining values up to
// multiples of `grid`. The level DP packs the discretized items into bins of
// size dp_capacity() = 1 + 4*eps, and the tracking executor replays its action
// table on the original items with bins of size track_capacity() = 1 + 6*eps,
// opening a fresh copy of a bin whenever the realized and step-1 usages drift
// more than eps apart.
// ---------------------------------------------------------------------------

struct DiscretizationParams {
  Rational eps;
  Rational small_cut;  // eps^4
  Rational grid;       // eps^5 by default; coarser overrides keep desk runs small

  Rational dp_capacity() const { return Rational(1) + 4 * eps; }
  Rational track_capacity() const { return Rational(1) + 6 * eps; }

  // eps in (0, sqrt(6)*(sqrt(15)-3)] (checked exactly by squaring),
  // 0 < grid <= small_cut, small_cut == eps^4.
  void validate() const;
};

DiscretizationParams make_discretization(const Rational& eps);
DiscretizationParams make_discretization(const Rational& eps, const Rational& grid);

// Per-item discretization with the atom-level maps that drive the coupled
// triple (X, X', Xhat) from one uniform draw: a large original atom (value
// > small_cut) maps deterministically to itself in X' and to its rounded
// value in Xhat; a small atom maps to small_cut with conditional probability
// hi_threshold (= E[X | small] / small_cut split across the atom's mass slice)
// and to 0 otherwise, in both X' and Xhat.
struct DiscretizedItem {
  FiniteDiscrete mid;  // X': step 1 only (exactly mean-preserving)
  FiniteDiscrete hat;  // Xhat: step 2 applied on top
  std::vector<char> small;            // per original atom
  std::vector<Rational> hi_threshold; // small atoms: P(X' = small_cut | atom); else 0
  std::vector<Rational> hat_value;    // large atoms: rounded value; small atoms: unused
};

DiscretizedItem discretize_item(const FiniteDiscrete& d, const DiscretizationParams& params);

// The discretized law only (hat part).
FiniteDiscrete discretize(const FiniteDiscrete& d, const DiscretizationParams& params);

// Applies discretize to every item; capacity and penalty are kept.
Instance discretize_instance(const Instance& inst, const DiscretizationParams& params);

// ---------------------------------------------------------------------------
// Level-count DP: the state is the round index plus the vector (k_0..k_r) of
// open-bin counts per usage level j*grid, r = ceil(dp_capacity / grid). Bins
// pushed past the soft capacity pay the penalty and leave the vector.
// ---------------------------------------------------------------------------

struct PtasAction {
  bool open = true;
  std::size_t level = 0;  // when !open: use an open bin at this usage level
};

struct PtasDpResult {
  Rational value;
  std::size_t states = 0;
  std::size_t levels = 0;  // r + 1 == size of the count vector
  std::map<std::string, PtasAction> actions;
};

// Canonical memo key: "t|j:k,..." over nonzero counts (equal vectors collide).
std::string level_state_key(std::size_t t, const std::vector<std::uint32_t>& counts);

// `hat` must carry items whose atoms all sit on the grid (multiples of
// params.grid); note the small_cut atom requires grid | small_cut, which the
// default eps^5 grid satisfies only for integer 1/eps — desk runs override the
// grid. capacity_override replaces dp_capacity() for capacity-sweep tests.
PtasDpResult ptas_dp(const Instance& hat, const DiscretizationParams& params,
                     std::optional<Rational> capacity_override = {},
                     std::size_t max_states = 5'000'000);

// Action-table round trip; the params travel with the table and loading
// checks them against the expected ones.
std::string serialize_ptas(const PtasDpResult& dp, const DiscretizationParams& params);
std::pair<PtasDpResult, DiscretizationParams> parse_ptas(const std::string& text);
void require_same_params(const DiscretizationParams& a, const DiscretizationParams& b);

// ---------------------------------------------------------------------------
// Tracking executor: one episode on the original items at track_capacity().
// ---------------------------------------------------------------------------

struct TrackReport {
  EpisodeRecord record;                       // real bins (all copies), exact accounting
  std::vector<std::size_t> copies_per_source; // copies opened per simulated bin
  std::size_t copies_opened = 0;              // extra copies (beyond each first)
  // A copy bin broke while its simulated source bin did not. The conversion
  // argument rules this out; a nonzero count signals an implementation bug.
  std::size_t breaches = 0;
};

TrackReport track_execute(const Instance& original, const DiscretizationParams& params,
                          const PtasDpResult& dp, Rng& rng);

}  // namespace abp
