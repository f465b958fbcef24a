#include "abp/policies.hpp"

#include "abp/errors.hpp"
#include "abp/mdp.hpp"

namespace abp {

PolicySpec parse_policy_spec(const std::string& text) {
  PolicySpec spec;
  spec.label = text;
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto need_arg = [&](const char* what) {
    if (arg.empty()) throw validation_error(std::string("policy ") + head + " needs a " + what);
  };
  if (head == "bg") {
    spec.kind = PolicyKind::budgeted_greedy;
    need_arg("gamma");
    spec.gamma = arg == "sqrt2" ? Quad::sqrt2() : Quad(parse_rational(arg));
    if (spec.gamma.sign() <= 0) throw validation_error("bg gamma must be positive");
  } else if (head == "fg") {
    spec.kind = PolicyKind::full_greedy;
  } else if (head == "ft" || head == "tg") {
    spec.kind = head == "ft" ? PolicyKind::fixed_threshold : PolicyKind::threshold_greedy;
    need_arg("threshold");
    spec.alpha = parse_rational(arg);
    if (spec.alpha < 0 || spec.alpha > 1)
      throw validation_error(head + " threshold must lie in [0, 1]");
  } else if (head == "split") {
    spec.kind = PolicyKind::rate_split;
    spec.gamma = arg.empty() ? Quad(Rational(1))
                             : (arg == "sqrt2" ? Quad::sqrt2() : Quad(parse_rational(arg)));
    if (spec.gamma.sign() <= 0) throw validation_error("split gamma must be positive");
  } else if (head == "mdp") {
    spec.kind = PolicyKind::mdp_threshold;
  } else {
    throw validation_error("unknown policy: " + text);
  }
  return spec;
}

PolicySpec resolve_policy(const PolicySpec& spec, const Instance& inst) {
  if (spec.kind != PolicyKind::mdp_threshold) return spec;
  if (!inst.all_finite() || !inst.iid())
    throw validation_error("mdp policy needs an i.i.d. finite-support instance");
  ThresholdResult thr = mdp_threshold_for(inst.items[0].fin(), to_double(inst.penalty),
                                          MdpOptions{}, inst.capacity);
  PolicySpec out = spec;
  out.kind = PolicyKind::fixed_threshold;
  out.alpha = thr.alpha;
  return out;
}

Decision decide_budgeted_greedy(std::span<const ExactBinView> bins, const FiniteDiscrete& item,
                                const Quad& budget, const Rational& cap) {
  for (std::size_t j = 0; j < bins.size(); ++j) {
    if (bins[j].broken) continue;
    Rational p = overflow_prob_exact(item, bins[j].usage, cap);
    if (Quad(bins[j].risk + p) <= budget) return {false, j};
  }
  return {};
}

namespace {

Decision greedy_core(std::span<const ExactBinView> bins, const FiniteDiscrete& item,
                     const Rational& penalty, const Rational& cap, const Rational* alpha) {
  bool found = false;
  std::size_t best = 0;
  Rational best_p;
  for (std::size_t j = 0; j < bins.size(); ++j) {
    if (bins[j].broken) continue;
    if (alpha && bins[j].usage > *alpha) continue;
    Rational p = overflow_prob_exact(item, bins[j].usage, cap);
    if (!found || p < best_p) {  // strict: first minimizer wins, lowest index
      found = true;
      best = j;
      best_p = p;
    }
  }
  if (found && penalty * best_p <= 1) return {false, best};
  return {};
}

}  // namespace

Decision decide_full_greedy(std::span<const ExactBinView> bins, const FiniteDiscrete& item,
                            const Rational& penalty, const Rational& cap) {
  return greedy_core(bins, item, penalty, cap, nullptr);
}

Decision decide_threshold_greedy(std::span<const ExactBinView> bins, const FiniteDiscrete& item,
                                 const Rational& penalty, const Rational& cap,
                                 const Rational& alpha) {
  return greedy_core(bins, item, penalty, cap, &alpha);
}

Decision decide_fixed_threshold(std::span<const ExactBinView> bins, const Rational& alpha) {
  if (bins.empty()) return {};
  const auto& last = bins.back();
  if (!last.broken && last.usage <= alpha) return {false, bins.size() - 1};
  return {};
}

Decision decide_exact(const PolicySpec& spec, std::span<const ExactBinView> bins,
                      const FiniteDiscrete& item, const Rational& penalty, const Rational& cap) {
  switch (spec.kind) {
    case PolicyKind::budgeted_greedy:
      return decide_budgeted_greedy(bins, item, spec.gamma * Quad(penalty).inverse(), cap);
    case PolicyKind::full_greedy:
      return decide_full_greedy(bins, item, penalty, cap);
    case PolicyKind::fixed_threshold:
      return decide_fixed_threshold(bins, spec.alpha);
    case PolicyKind::threshold_greedy:
      return decide_threshold_greedy(bins, item, penalty, cap, spec.alpha);
    case PolicyKind::mdp_threshold:
      throw validation_error("mdp policy must be resolved before exact evaluation");
    case PolicyKind::rate_split:
      throw validation_error("rate_split is simulator-only");
  }
  throw validation_error("bad policy kind");
}

}  // namespace abp
