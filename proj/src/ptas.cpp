#include "abp/ptas.hpp"

#include "abp/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>

namespace abp {

// ---------------------------------------------------------------------------
// Parameters.
// ---------------------------------------------------------------------------

void DiscretizationParams::validate() const {
  if (!(eps > 0)) throw validation_error("eps must be positive");
  // eps <= sqrt(6)*(sqrt(15)-3)  <=>  eps <= 6 and 216*eps^2 <= (36 - eps^2)^2
  const Rational e2 = eps * eps;
  if (eps > 6 || 216 * e2 > (36 - e2) * (36 - e2))
    throw validation_error("eps exceeds the approximation scheme's range");
  if (small_cut != e2 * e2) throw validation_error("small-value cutoff must equal eps^4");
  if (!(grid > 0) || grid > small_cut)
    throw validation_error("grid step must lie in (0, eps^4]");
}

DiscretizationParams make_discretization(const Rational& eps) {
  const Rational e2 = eps * eps;
  const Rational cut = e2 * e2;
  // Default grid eps^5; clamped to the small-value cutoff so the default stays
  // valid over the whole admissible eps range (which extends past 1).
  DiscretizationParams p{eps, cut, eps < 1 ? Rational(cut * eps) : cut};
  p.validate();
  return p;
}

DiscretizationParams make_discretization(const Rational& eps, const Rational& grid) {
  const Rational e2 = eps * eps;
  DiscretizationParams p{eps, e2 * e2, grid};
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// Discretization.
// ---------------------------------------------------------------------------

namespace {

Rational ceil_to_grid(const Rational& v, const Rational& grid) {
  const Rational q = v / grid;
  const BigInt c = -floor_div(-numerator(q), denominator(q));
  return Rational(c) * grid;
}

FiniteDiscrete finite_of(std::vector<Atom> atoms) {
  return SizeDistribution::finite(std::move(atoms)).fin();
}

}  // namespace

DiscretizedItem discretize_item(const FiniteDiscrete& d, const DiscretizationParams& params) {
  params.validate();
  DiscretizedItem out;
  out.small.resize(d.atoms.size(), 0);
  out.hi_threshold.resize(d.atoms.size(), Rational(0));
  out.hat_value.resize(d.atoms.size(), Rational(0));

  Rational zero_mass, cut_mass;
  std::vector<Atom> mid_atoms, hat_atoms;
  for (std::size_t a = 0; a < d.atoms.size(); ++a) {
    const Atom& at = d.atoms[a];
    if (at.value <= params.small_cut) {
      // mean-preserving per atom: value v maps to small_cut w.p. v/small_cut
      out.small[a] = 1;
      out.hi_threshold[a] = at.value / params.small_cut;
      cut_mass += at.prob * out.hi_threshold[a];
      zero_mass += at.prob * (1 - out.hi_threshold[a]);
    } else {
      out.hat_value[a] = ceil_to_grid(at.value, params.grid);
      mid_atoms.push_back(at);
      hat_atoms.push_back({out.hat_value[a], at.prob});
    }
  }
  if (zero_mass > 0) {
    mid_atoms.push_back({Rational(0), zero_mass});
    hat_atoms.push_back({Rational(0), zero_mass});
  }
  if (cut_mass > 0) {
    mid_atoms.push_back({params.small_cut, cut_mass});
    hat_atoms.push_back({params.small_cut, cut_mass});
  }
  out.mid = finite_of(std::move(mid_atoms));
  out.hat = finite_of(std::move(hat_atoms));
  return out;
}

FiniteDiscrete discretize(const FiniteDiscrete& d, const DiscretizationParams& params) {
  return discretize_item(d, params).hat;
}

Instance discretize_instance(const Instance& inst, const DiscretizationParams& params) {
  inst.validate();
  if (!inst.all_finite())
    throw validation_error("discretization needs finite-support items");
  Instance out;
  out.penalty = inst.penalty;
  out.capacity = inst.capacity;
  out.items.reserve(inst.size());
  for (const SizeDistribution& item : inst.items)
    out.items.push_back(SizeDistribution::finite(
        discretize(item.fin(), params).atoms));
  return out;
}

// ---------------------------------------------------------------------------
// Level-count DP.
// ---------------------------------------------------------------------------

std::string level_state_key(std::size_t t, const std::vector<std::uint32_t>& counts) {
  std::ostringstream os;
  os << t << '|';
  for (std::size_t j = 0; j < counts.size(); ++j)
    if (counts[j]) os << j << ':' << counts[j] << ',';
  return os.str();
}

namespace {

struct LevelAtom {
  std::size_t level;  // value / grid
  Rational prob;
};

struct LevelDp {
  const Instance& inst;
  std::vector<std::vector<LevelAtom>> items;  // per item, per atom
  std::size_t max_total;                      // levels above this overflow
  std::size_t max_states;
  std::map<std::string, Rational> memo;
  std::map<std::string, PtasAction>* actions;

  Rational solve(std::size_t t, std::vector<std::uint32_t>& counts) {
    if (t == inst.size()) return Rational(0);
    const std::string key = level_state_key(t, counts);
    auto hit = memo.find(key);
    if (hit != memo.end()) return hit->second;
    if (memo.size() >= max_states)
      throw resource_cap_error("level DP: state cap exceeded");

    Rational best;
    PtasAction best_act;
    bool have = false;
    auto consider = [&](const Rational& val, const PtasAction& act) {
      if (!have || val < best) {
        have = true;
        best = val;
        best_act = act;
      }
    };

    {
      Rational val(1);
      for (const LevelAtom& a : items[t]) {
        if (a.level > max_total) {
          val += a.prob * (inst.penalty + solve(t + 1, counts));
        } else {
          ++counts[a.level];
          val += a.prob * solve(t + 1, counts);
          --counts[a.level];
        }
      }
      consider(val, PtasAction{true, 0});
    }

    for (std::size_t j = 0; j <= max_total; ++j) {
      if (!counts[j]) continue;
      Rational val(0);
      --counts[j];
      for (const LevelAtom& a : items[t]) {
        if (j + a.level > max_total) {
          val += a.prob * (inst.penalty + solve(t + 1, counts));
        } else {
          ++counts[j + a.level];
          val += a.prob * solve(t + 1, counts);
          --counts[j + a.level];
        }
      }
      ++counts[j];
      consider(val, PtasAction{false, j});
    }

    memo.emplace(key, best);
    if (actions) actions->emplace(key, best_act);
    return best;
  }
};

std::size_t level_of(const Rational& value, const Rational& grid) {
  const Rational q = value / grid;
  if (denominator(q) != 1)
    throw validation_error("item atom " + format_rational(value) +
                           " is not a multiple of the grid step");
  const BigInt lv = numerator(q);
  if (lv < 0 || lv > std::numeric_limits<std::uint32_t>::max())
    throw validation_error("grid level out of range");
  return std::size_t(lv);
}

}  // namespace

PtasDpResult ptas_dp(const Instance& hat, const DiscretizationParams& params,
                     std::optional<Rational> capacity_override, std::size_t max_states) {
  hat.validate();
  params.validate();
  if (!hat.all_finite())
    throw validation_error("level DP needs finite-support items");
  const Rational cap = capacity_override ? *capacity_override : params.dp_capacity();
  if (!(cap > 0)) throw validation_error("capacity must be positive");

  // usage j*grid + value lv*grid overflows iff j + lv > floor(cap / grid)
  const Rational cap_levels = cap / params.grid;
  const BigInt mt = floor_div(numerator(cap_levels), denominator(cap_levels));
  if (mt < 0 || mt > 4'000'000)
    throw resource_cap_error("level DP: too many usage levels");
  const std::size_t max_total = std::size_t(mt);

  PtasDpResult res;
  LevelDp dp{hat, {}, max_total, max_states, {}, &res.actions};
  dp.items.reserve(hat.size());
  for (const SizeDistribution& item : hat.items) {
    std::vector<LevelAtom> la;
    la.reserve(item.fin().atoms.size());
    for (const Atom& a : item.fin().atoms)
      la.push_back({level_of(a.value, params.grid), a.prob});
    dp.items.push_back(std::move(la));
  }

  std::vector<std::uint32_t> counts(max_total + 1, 0);
  res.value = dp.solve(0, counts);
  res.states = dp.memo.size();
  res.levels = max_total + 1;
  return res;
}

// ---------------------------------------------------------------------------
// Action-table serialization.
// ---------------------------------------------------------------------------

std::string serialize_ptas(const PtasDpResult& dp, const DiscretizationParams& params) {
  nlohmann::json j;
  j["eps"] = format_rational(params.eps);
  j["small_cut"] = format_rational(params.small_cut);
  j["grid"] = format_rational(params.grid);
  j["value"] = format_rational(dp.value);
  j["states"] = dp.states;
  j["levels"] = dp.levels;
  nlohmann::json acts = nlohmann::json::object();
  for (const auto& [key, act] : dp.actions)
    acts[key] = act.open ? std::string("open") : "use:" + std::to_string(act.level);
  j["actions"] = std::move(acts);
  return j.dump(2);
}

std::pair<PtasDpResult, DiscretizationParams> parse_ptas(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("bad action table: ") + e.what());
  }
  try {
    DiscretizationParams params{parse_rational(j.at("eps").get<std::string>()),
                                parse_rational(j.at("small_cut").get<std::string>()),
                                parse_rational(j.at("grid").get<std::string>())};
    params.validate();
    PtasDpResult dp;
    dp.value = parse_rational(j.at("value").get<std::string>());
    dp.states = j.at("states").get<std::size_t>();
    dp.levels = j.at("levels").get<std::size_t>();
    for (auto it = j.at("actions").begin(); it != j.at("actions").end(); ++it) {
      const std::string v = it.value().get<std::string>();
      if (v == "open")
        dp.actions.emplace(it.key(), PtasAction{true, 0});
      else if (v.rfind("use:", 0) == 0)
        dp.actions.emplace(it.key(), PtasAction{false, std::stoul(v.substr(4))});
      else
        throw validation_error("bad action table entry: " + v);
    }
    return {std::move(dp), params};
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("bad action table: ") + e.what());
  }
}

void require_same_params(const DiscretizationParams& a, const DiscretizationParams& b) {
  if (a.eps != b.eps || a.small_cut != b.small_cut || a.grid != b.grid)
    throw validation_error("action table was built with different discretization parameters");
}

// ---------------------------------------------------------------------------
// Tracking executor.
// ---------------------------------------------------------------------------

TrackReport track_execute(const Instance& original, const DiscretizationParams& params,
                          const PtasDpResult& dp, Rng& rng) {
  original.validate();
  params.validate();
  if (!original.all_finite())
    throw validation_error("tracking executor needs finite-support items");
  if (original.capacity != 1)
    throw validation_error("tracking executor assumes unit base capacity");

  const Rational dp_cap = params.dp_capacity();
  {
    const Rational cap_levels = dp_cap / params.grid;
    const std::size_t mt =
        std::size_t(floor_div(numerator(cap_levels), denominator(cap_levels)));
    if (dp.levels != mt + 1)
      throw validation_error("action table does not match these discretization parameters");
  }

  Instance track = original;
  track.capacity = params.track_capacity();

  std::vector<DiscretizedItem> disc;
  disc.reserve(original.size());
  for (const SizeDistribution& item : original.items)
    disc.push_back(discretize_item(item.fin(), params));

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  struct SimBin {
    Rational usage;           // simulated (hat) usage
    std::size_t level = 0;    // usage / grid while unbroken
    bool broken = false;
    std::size_t active_copy = kNone;  // index into the real episode's bins
    Rational x_sum;           // real sizes in the active copy
    Rational mid_sum;         // step-1 sizes in the active copy
  };
  std::vector<SimBin> sim;
  std::vector<std::uint32_t> counts(dp.levels, 0);

  TrackReport rep;
  EpisodeRecord& ep = rep.record;

  for (std::size_t t = 0; t < original.size(); ++t) {
    const FiniteDiscrete& law = original.items[t].fin();
    const double u = rng.next_double();
    const std::size_t a = quantile_index(law, u);
    const Rational x = law.atoms[a].value;
    Rational x_mid, x_hat;
    if (disc[t].small[a]) {
      const double lo = a == 0 ? 0.0 : law.cum_d[a - 1];
      const double width = law.cum_d[a] - lo;
      const double frac = width > 0 ? (u - lo) / width : 0.0;
      const bool hi = frac < to_double(disc[t].hi_threshold[a]);
      x_mid = hi ? params.small_cut : Rational(0);
      x_hat = x_mid;
    } else {
      x_mid = x;
      x_hat = disc[t].hat_value[a];
    }

    const auto it = dp.actions.find(level_state_key(t, counts));
    if (it == dp.actions.end())
      throw validation_error("action table has no entry for reached state");
    std::size_t j = kNone;
    if (it->second.open) {
      j = sim.size();
      sim.push_back({});
    } else {
      for (std::size_t b = 0; b < sim.size(); ++b)
        if (!sim[b].broken && sim[b].active_copy != kNone && sim[b].level == it->second.level) {
          j = b;
          break;
        }
      if (j == kNone)
        throw validation_error("action table names a level with no open bin");
    }
    SimBin& B = sim[j];

    // real side: pack x into B's active copy, or a fresh copy when the first
    // item arrives, the deviation bound fails, or (breach fallback) the copy
    // broke while the simulated bin did not.
    bool fresh = false;
    if (B.active_copy == kNone || ep.bins[B.active_copy].broken) {
      fresh = true;
    } else {
      Rational dev = B.x_sum - B.mid_sum;
      if (dev < 0) dev = -dev;
      fresh = dev > params.eps;
    }
    if (fresh) {
      const std::size_t copy = ep.bins.size();
      pack_step(track, ep, Decision{true, 0}, x, t);
      if (B.active_copy != kNone) ++rep.copies_opened;
      if (rep.copies_per_source.size() <= j) rep.copies_per_source.resize(j + 1, 0);
      ++rep.copies_per_source[j];
      B.active_copy = copy;
      B.x_sum = x;
      B.mid_sum = x_mid;
    } else {
      pack_step(track, ep, Decision{false, B.active_copy}, x, t);
      B.x_sum += x;
      B.mid_sum += x_mid;
    }
    if (ep.bins[B.active_copy].broken && !B.broken) ++rep.breaches;

    // simulated side: pack x_hat (a used bin leaves its level; it re-enters
    // at the new level unless the soft capacity broke it)
    if (!it->second.open) --counts[B.level];
    B.usage += x_hat;
    if (B.usage > dp_cap) {
      B.broken = true;
    } else {
      B.level = level_of(B.usage, params.grid);
      ++counts[B.level];
    }
  }
  return rep;
}

}  // namespace abp
