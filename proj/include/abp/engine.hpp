#pragma once

#include "abp/instance.hpp"
#include "abp/policies.hpp"
#include "abp/rng.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace abp {

// ---------------------------------------------------------------------------
// Exact episode machinery (reference semantics, rational arithmetic).
// ---------------------------------------------------------------------------

struct EpisodeBin {
  Rational usage;       // sum of realized sizes packed here
  Rational risk_spent;  // sum of overflow probabilities charged at pack time
  bool broken = false;  // set once usage strictly exceeds capacity
  std::vector<std::size_t> items;
  Rational trunc_sum;   // sum of min(size, capacity) over packed items
};

struct EpisodeRecord {
  std::vector<EpisodeBin> bins;        // creation order
  std::vector<std::size_t> item_bin;   // bin index per item
  std::size_t opened = 0;
  std::size_t broken = 0;
  Rational total_risk;                 // == sum of bins[j].risk_spent
  Rational cost;                       // opened + penalty * broken, exact
};

// Applies one decision + realized size to the episode. Open creates a bin;
// Use(j) requires bin j to exist and be unbroken. The receiving bin is charged
// overflow_prob(item, usage-before, cap) as risk before the size is added; the
// bin breaks when the new usage strictly exceeds the capacity.
// The item's law is needed for the risk charge; sizes outside the law's
// support are rejected for finite laws.
void pack_step(const Instance& inst, EpisodeRecord& ep, const Decision& d,
               const Rational& size, std::size_t item_idx);

// Snapshot of the unbroken/broken bins as the pure deciders see them.
std::vector<ExactBinView> visible_bins(const EpisodeRecord& ep);

// Replays `spec` (must be resolved; see resolve_policy) against fixed realized
// sizes, one per item. Finite-law instances only.
EpisodeRecord run_episode_sizes(const Instance& inst, const PolicySpec& spec,
                                std::span<const Rational> sizes);

// Same loop with an arbitrary decision callback (policy trees, searches).
using ExactDecider =
    std::function<Decision(std::span<const ExactBinView>, std::size_t item_index)>;
EpisodeRecord run_episode_custom(const Instance& inst, std::span<const Rational> sizes,
                                 const ExactDecider& decide);

// Samples one size per item from `rng` (exactly one uniform draw per item) and
// runs the policy. Finite instances take the exact path; exponential instances
// run in floating point and the record's rational fields carry the exact
// values of the computed doubles.
EpisodeRecord run_episode(const Instance& inst, const PolicySpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// Monte Carlo evaluation.
// ---------------------------------------------------------------------------

struct MonteCarloOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  // 0 = read ABP_WORKERS, else hardware concurrency. Trial t always uses
  // Rng(seed, t) and per-trial results are reduced in trial order, so results
  // are bit-identical for every worker count.
  unsigned workers = 0;
  // Collect per-bin-index counters (forces one worker so the floating-point
  // per-bin accumulations are order-independent too).
  bool per_bin = false;
  bool keep_trial_costs = false;
};

// Counters indexed by bin creation index j, accumulated over all trials.
// Counts are exact; the sums are doubles accumulated in trial order.
struct PerBinCounters {
  std::vector<std::int64_t> open_count;   // trials in which bin j was created
  std::vector<std::int64_t> break_count;  // trials in which bin j broke
  std::vector<double> risk_sum;           // sum over trials of bin j's final risk
  std::vector<double> trunc_sum;          // sum over trials of bin j's truncated size sum
  std::vector<double> trunc_sq_sum;       // sum of squares of the same
};

struct MonteCarloStats {
  std::size_t trials = 0;
  double mean_cost = 0.0;
  double stderr_cost = 0.0;  // sample std / sqrt(trials)
  double mean_opened = 0.0;
  double mean_broken = 0.0;
  double mean_total_risk = 0.0;   // mean over trials of summed bin risks
  double mean_trunc_total = 0.0;  // mean over trials of sum_i min(X_i, cap)
  // stderr of the per-trial difference (broken - total risk), for the
  // risk-identity check.
  double stderr_broken_minus_risk = 0.0;
  PerBinCounters per_bin;              // filled when options.per_bin
  std::vector<double> trial_costs;     // filled when options.keep_trial_costs
};

// `spec` may be unresolved; mdp thresholds are resolved once up front.
MonteCarloStats monte_carlo(const Instance& inst, const PolicySpec& spec,
                            const MonteCarloOptions& opts);

// One simulation per trial with checkpoints at each requested prefix length k
// (0 < k <= n, strictly increasing): the returned stats[i] equals a Monte
// Carlo run of the first prefixes[i] items, and curves across prefixes are
// sample-coupled because each trial reuses one stream.
std::vector<MonteCarloStats> monte_carlo_prefixes(const Instance& inst, const PolicySpec& spec,
                                                  std::span<const std::size_t> prefixes,
                                                  const MonteCarloOptions& opts);

unsigned default_worker_count();

}  // namespace abp
