#pragma once

#include "abp/distribution.hpp"
#include "abp/instance.hpp"
#include "abp/rational.hpp"

#include <span>
#include <string>
#include <vector>

namespace abp {

// What a policy does with the next item: open a fresh bin, or place it into an
// existing bin (index into the creation-ordered bin list).
struct Decision {
  bool open = true;
  std::size_t bin = 0;
};

enum class PolicyKind {
  budgeted_greedy,   // risk budget gamma/C per bin; first bin that still fits the charge
  full_greedy,       // min expected overflow penalty; open when that exceeds 1
  fixed_threshold,   // single active bin, abandon once usage exceeds alpha
  threshold_greedy,  // full greedy restricted to bins with usage <= alpha
  mdp_threshold,     // fixed_threshold with alpha from the value-iteration extractor
  rate_split         // independent budgeted-greedy streams, one per distinct rate
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::full_greedy;
  Quad gamma;               // budgeted_greedy / rate_split budget multiplier
  Rational alpha;           // thresholds (exact; decimal CLI text parses exactly)
  std::string label;        // display name, e.g. "bg:1.4142"
};

// Parses "bg:<gamma>", "bg:sqrt2", "fg", "ft:<alpha>", "tg:<alpha>", "mdp",
// "split[:<gamma>]" (gamma defaults to 1). Numeric parameters are parsed as
// exact rationals ("sqrt2" is accepted for gamma).
PolicySpec parse_policy_spec(const std::string& text);

// Replaces mdp_threshold by a concrete fixed_threshold for this instance
// (requires an i.i.d. finite-support instance). Other kinds pass through.
PolicySpec resolve_policy(const PolicySpec& spec, const Instance& inst);

// Exact-arithmetic view of a bin for the pure deciders.
struct ExactBinView {
  Rational usage;
  Rational risk;  // accumulated overflow probabilities charged at pack time
  bool broken = false;
};

// Pure decision rules (exact arithmetic; finite laws). These definitions are
// the reference semantics; the simulator's fast paths must match them.
//
// budgeted greedy: use the lowest-indexed unbroken bin j with
//   risk_j + P(X > cap - usage_j) <= budget; otherwise open.
Decision decide_budgeted_greedy(std::span<const ExactBinView> bins, const FiniteDiscrete& item,
                                const Quad& budget, const Rational& cap);

// full greedy: among unbroken bins minimize C * P(X > cap - usage) (ties to the
// lowest index); use it if the minimum is <= 1 (ties use), else open.
Decision decide_full_greedy(std::span<const ExactBinView> bins, const FiniteDiscrete& item,
                            const Rational& penalty, const Rational& cap);

// threshold greedy: full greedy over bins with usage <= alpha only.
Decision decide_threshold_greedy(std::span<const ExactBinView> bins, const FiniteDiscrete& item,
                                 const Rational& penalty, const Rational& cap,
                                 const Rational& alpha);

// fixed threshold: only the most recently opened bin is ever considered; use it
// while it is unbroken and usage <= alpha, else open.
Decision decide_fixed_threshold(std::span<const ExactBinView> bins, const Rational& alpha);

// Dispatch on a resolved spec (rate_split is simulator-only and rejected here).
Decision decide_exact(const PolicySpec& spec, std::span<const ExactBinView> bins,
                      const FiniteDiscrete& item, const Rational& penalty, const Rational& cap);

}  // namespace abp
