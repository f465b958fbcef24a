// Command-line front end: generate instances, run simulations, exact solvers,
// the approximation pipeline, threshold extraction, and the counting
// reduction. Emits human-readable lines on stdout, CSV for simulation sweeps,
// and JSON run reports on request.

#include <CLI11.hpp>
#include <json.hpp>

#include "abp/engine.hpp"
#include "abp/errors.hpp"
#include "abp/exact.hpp"
#include "abp/generators.hpp"
#include "abp/instance.hpp"
#include "abp/mdp.hpp"
#include "abp/policies.hpp"
#include "abp/ptas.hpp"
#include "abp/rational.hpp"
#include "abp/reduction.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace abp;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write file: " + path);
  out << text;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

Quad parse_gamma(const std::string& text) {
  if (text == "sqrt2") return Quad::sqrt2();
  return Quad(parse_rational(text));
}

std::string hex_digest(std::uint64_t d) {
  std::ostringstream ss;
  ss << std::hex << d;
  return ss.str();
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

json instance_info(const Instance& inst, const std::string& path) {
  json j;
  j["path"] = path;
  j["items"] = inst.size();
  j["penalty"] = format_rational(inst.penalty);
  j["capacity"] = format_rational(inst.capacity);
  j["digest"] = hex_digest(instance_digest(inst));
  return j;
}

void maybe_write_report(const std::string& path, const json& report) {
  if (!path.empty()) write_file(path, report.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string name;
  std::size_t n = 0;
  std::string penalty = "50";
  std::string alpha;
  std::size_t n1 = 0;
  double eps = 0.0;
  std::string out;
  std::string report;
};

void run_generate(const GenerateArgs& a, const std::vector<std::string>& argv) {
  Timer timer;
  GenParams gp;
  gp.n = a.n;
  gp.penalty = parse_rational(a.penalty);
  if (!a.alpha.empty()) gp.alpha = parse_rational(a.alpha);
  gp.n1 = a.n1;
  gp.eps = a.eps;
  const Instance inst = gen_named(a.name, gp);
  if (a.out.empty()) {
    std::cout << instance_to_json(inst) << '\n';
  } else {
    save_instance(inst, a.out);
    std::cout << "wrote " << a.out << ": " << inst.size() << " items, digest "
              << hex_digest(instance_digest(inst)) << '\n';
  }
  json report;
  report["command"] = "generate";
  report["argv"] = argv;
  report["family"] = a.name;
  report["instance"] = instance_info(inst, a.out);
  report["wall_clock_seconds"] = timer.seconds();
  maybe_write_report(a.report, report);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string input;
  std::string policies;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::string prefix_sweep;
  unsigned workers = 0;
  std::string out;     // CSV path; empty = stdout
  std::string report;  // JSON path
};

void run_simulate(const SimulateArgs& a, const std::vector<std::string>& argv) {
  Timer timer;
  const Instance inst = load_instance(a.input);
  const std::size_t n = inst.size();

  std::vector<PolicySpec> specs;
  for (const std::string& part : split(a.policies, ',')) {
    if (!part.empty()) specs.push_back(parse_policy_spec(part));
  }
  if (specs.empty()) throw validation_error("no policies given");

  std::vector<std::size_t> prefixes;
  if (a.prefix_sweep.empty()) {
    prefixes.push_back(n);
  } else {
    for (const std::string& part : split(a.prefix_sweep, ',')) {
      if (part.empty()) continue;
      const long long k = std::stoll(part);
      if (k <= 0 || static_cast<std::size_t>(k) > n) {
        throw validation_error("prefix out of range: " + part);
      }
      prefixes.push_back(static_cast<std::size_t>(k));
    }
    if (prefixes.empty()) throw validation_error("empty prefix sweep");
    for (std::size_t i = 1; i < prefixes.size(); ++i) {
      if (prefixes[i] <= prefixes[i - 1]) {
        throw validation_error("prefix sweep must be strictly increasing");
      }
    }
  }

  // Reference cost per prefix: the single-active-bin optimum when the
  // instance is i.i.d. with a finite law, else the n/C + 1 proxy.
  const bool exact_ref = inst.iid() && inst.all_finite();
  const double penalty_d = to_double(inst.penalty);
  std::vector<double> refs;
  refs.reserve(prefixes.size());
  for (const std::size_t k : prefixes) {
    refs.push_back(exact_ref
                       ? single_bin_optimal_iid_fp(inst.items[0].fin(), k, penalty_d, inst.capacity)
                       : static_cast<double>(k) / penalty_d + 1.0);
  }

  MonteCarloOptions opts;
  opts.trials = a.trials;
  opts.seed = a.seed;
  opts.workers = a.workers;

  std::ostringstream csv;
  csv << "prefix,policy,mean_cost,stderr,mean_opened,mean_broken,ref_cost,ratio\n";
  json rows = json::array();
  json policies = json::array();
  for (const PolicySpec& spec : specs) {
    const std::vector<MonteCarloStats> stats =
        monte_carlo_prefixes(inst, spec, prefixes, opts);
    json policy_rows = json::array();
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
      const MonteCarloStats& s = stats[i];
      const double ratio = s.mean_cost / refs[i];
      csv << prefixes[i] << ',' << spec.label << ',' << format_double(s.mean_cost) << ','
          << format_double(s.stderr_cost) << ',' << format_double(s.mean_opened) << ','
          << format_double(s.mean_broken) << ',' << format_double(refs[i]) << ','
          << format_double(ratio) << '\n';
      json row;
      row["prefix"] = prefixes[i];
      row["policy"] = spec.label;
      row["mean_cost"] = s.mean_cost;
      row["stderr"] = s.stderr_cost;
      row["mean_opened"] = s.mean_opened;
      row["mean_broken"] = s.mean_broken;
      row["mean_total_risk"] = s.mean_total_risk;
      row["ref_cost"] = refs[i];
      row["ratio"] = ratio;
      rows.push_back(row);
      policy_rows.push_back(row);
    }
    json p;
    p["label"] = spec.label;
    p["rows"] = policy_rows;
    policies.push_back(p);
  }

  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(a.out, csv.str());
    std::cout << "wrote " << a.out << '\n';
  }

  json report;
  report["command"] = "simulate";
  report["argv"] = argv;
  report["seed"] = a.seed;
  report["trials"] = a.trials;
  report["instance"] = instance_info(inst, a.input);
  report["prefixes"] = prefixes;
  report["ref_kind"] = exact_ref ? "single_bin_dp" : "proxy_n_over_C_plus_1";
  report["policies"] = policies;
  report["rows"] = rows;
  report["wall_clock_seconds"] = timer.seconds();
  maybe_write_report(a.report, report);
}

// ---------------------------------------------------------------------------
// exact
// ---------------------------------------------------------------------------

struct ExactArgs {
  std::string input;
  bool single_bin = false;
  std::string budgeted;  // gamma text; empty = off
  bool self_check = false;
  std::size_t max_states = 10'000'000;
  std::string report;
};

void run_exact(const ExactArgs& a, const std::vector<std::string>& argv) {
  Timer timer;
  const Instance inst = load_instance(a.input);
  json report;
  report["command"] = "exact";
  report["argv"] = argv;
  report["instance"] = instance_info(inst, a.input);

  if (a.single_bin) {
    if (!(inst.iid() && inst.all_finite())) {
      throw validation_error("--single-bin needs an i.i.d. finite-law instance");
    }
    const Rational v =
        single_bin_optimal_iid(inst.items[0].fin(), inst.size(), inst.penalty, inst.capacity);
    std::cout << "single-bin optimal expected cost = " << format_rational(v) << " (~"
              << format_double(to_double(v)) << ")\n";
    report["single_bin_optimal"] = format_rational(v);
  } else if (!a.budgeted.empty()) {
    const Quad gamma = parse_gamma(a.budgeted);
    const Rational v = min_opened_budgeted(inst, gamma);
    std::cout << "minimum expected opened bins (budget " << a.budgeted
              << "/C) = " << format_rational(v) << " (~" << format_double(to_double(v)) << ")\n";
    report["min_opened_budgeted"] = format_rational(v);
    report["gamma"] = a.budgeted;
  } else {
    OptimalDpOptions opts;
    opts.max_states = a.max_states;
    const OptimalDpResult dp = optimal_cost_dp(inst, opts);
    std::cout << "optimal expected cost = " << format_rational(dp.value) << " (~"
              << format_double(to_double(dp.value)) << "), states = " << dp.states << '\n';
    report["optimal_cost"] = format_rational(dp.value);
    report["states"] = dp.states;
    if (a.self_check) {
      const PolicyTree tree = build_policy_tree_custom(inst, dp_action_decider(dp, inst));
      validate_tree(tree, inst);
      const Quad tree_value = eval_policy_tree(tree, inst);
      if (!(tree_value == Quad(dp.value))) {
        throw std::logic_error("self-check failed: tree evaluation differs from DP value");
      }
      std::cout << "self-check: extracted policy tree evaluates to the same value\n";
      report["self_check"] = "ok";
    }
  }
  report["wall_clock_seconds"] = timer.seconds();
  maybe_write_report(a.report, report);
}

// ---------------------------------------------------------------------------
// ptas
// ---------------------------------------------------------------------------

struct PtasArgs {
  std::string input;
  std::string eps;
  std::string grid;
  bool track = false;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::string report;
};

void run_ptas(const PtasArgs& a, const std::vector<std::string>& argv) {
  Timer timer;
  const Instance inst = load_instance(a.input);
  const Rational eps = parse_rational(a.eps);
  const DiscretizationParams params =
      a.grid.empty() ? make_discretization(eps) : make_discretization(eps, parse_rational(a.grid));
  const Instance hat = discretize_instance(inst, params);
  const PtasDpResult dp = ptas_dp(hat, params);
  std::cout << "discretized dp value = " << format_rational(dp.value) << " (~"
            << format_double(to_double(dp.value)) << "), states = " << dp.states
            << ", levels = " << dp.levels << '\n';

  json report;
  report["command"] = "ptas";
  report["argv"] = argv;
  report["instance"] = instance_info(inst, a.input);
  report["eps"] = format_rational(params.eps);
  report["small_cut"] = format_rational(params.small_cut);
  report["grid"] = format_rational(params.grid);
  report["dp_capacity"] = format_rational(params.dp_capacity());
  report["track_capacity"] = format_rational(params.track_capacity());
  report["dp_value"] = format_rational(dp.value);
  report["states"] = dp.states;
  report["levels"] = dp.levels;

  if (a.track) {
    double sum = 0, sumsq = 0;
    std::size_t breaches = 0, copies = 0;
    for (std::size_t t = 0; t < a.trials; ++t) {
      Rng rng(a.seed, t);
      const TrackReport r = track_execute(inst, params, dp, rng);
      const double c = to_double(r.record.cost);
      sum += c;
      sumsq += c * c;
      breaches += r.breaches;
      copies += r.copies_opened;
    }
    const double trials_d = static_cast<double>(a.trials);
    const double mean = sum / trials_d;
    const double var = a.trials > 1 ? (sumsq - sum * sum / trials_d) / (trials_d - 1) : 0.0;
    const double se = std::sqrt(std::max(0.0, var) / trials_d);
    std::cout << "tracked mean cost (capacity " << format_rational(params.track_capacity())
              << ") = " << format_double(mean) << " +- " << format_double(se) << " ("
              << a.trials << " episodes), extra copies = " << copies
              << ", deviation breaches = " << breaches << '\n';
    report["tracked"] = {{"trials", a.trials},
                         {"seed", a.seed},
                         {"mean_cost", mean},
                         {"stderr", se},
                         {"copies_opened", copies},
                         {"breaches", breaches}};
  }
  report["wall_clock_seconds"] = timer.seconds();
  maybe_write_report(a.report, report);
}

// ---------------------------------------------------------------------------
// threshold
// ---------------------------------------------------------------------------

struct ThresholdArgs {
  std::string input;
  double discount = 0.999;
  double tol = 1e-10;
  std::string report;
};

void run_threshold(const ThresholdArgs& a, const std::vector<std::string>& argv) {
  Timer timer;
  const Instance inst = load_instance(a.input);
  if (!(inst.iid() && inst.all_finite())) {
    throw validation_error("threshold extraction needs an i.i.d. finite-law instance");
  }
  MdpOptions opts;
  opts.discount = a.discount;
  opts.tol = a.tol;
  const ThresholdResult r =
      mdp_threshold_for(inst.items[0].fin(), to_double(inst.penalty), opts, inst.capacity);
  const double residual = r.residual_history.empty() ? 0.0 : r.residual_history.back();
  std::cout << "threshold alpha = " << format_rational(r.alpha) << " (~"
            << format_double(to_double(r.alpha)) << "), states = " << r.space.states.size()
            << ", iterations = " << r.iterations << ", residual = " << format_double(residual)
            << '\n';
  json report;
  report["command"] = "threshold";
  report["argv"] = argv;
  report["instance"] = instance_info(inst, a.input);
  report["alpha"] = format_rational(r.alpha);
  report["alpha_decimal"] = to_double(r.alpha);
  report["states"] = r.space.states.size();
  report["iterations"] = r.iterations;
  report["residual"] = residual;
  report["converged"] = r.converged;
  report["discount"] = a.discount;
  report["tol"] = a.tol;
  report["wall_clock_seconds"] = timer.seconds();
  maybe_write_report(a.report, report);
}

// ---------------------------------------------------------------------------
// reduce
// ---------------------------------------------------------------------------

const char* role_name(ReductionRole r) {
  switch (r) {
    case ReductionRole::chooser: return "chooser";
    case ReductionRole::chooser_twin: return "chooser_twin";
    case ReductionRole::witness_true: return "witness_true";
    case ReductionRole::witness_false: return "witness_false";
    case ReductionRole::clause_slack: return "clause_slack";
    case ReductionRole::closer: return "closer";
  }
  return "?";
}

struct ReduceArgs {
  std::string formula;
  std::string penalty = "10";
  std::string out;   // instance JSON path
  std::string meta;  // sidecar metadata path
  std::string report;
};

void run_reduce(const ReduceArgs& a, const std::vector<std::string>& argv) {
  Timer timer;
  Cnf input = parse_dimacs(read_file(a.formula));
  bool symmetrized = false;
  Cnf formula = input;
  if (!input.clauses.empty() && input.clauses[0].size() == 2) {
    formula = symmetrize_2cnf(input);
    symmetrized = true;
  }
  const std::uint64_t sat = count_sat_bruteforce(formula);
  const ReductionArtifacts art = reduction_instance(formula, parse_rational(a.penalty));
  const Rational predicted = reduction_value(art.n, sat);

  std::cout << "formula: " << input.n_vars << " vars, " << input.clauses.size() << " clauses";
  if (symmetrized) {
    std::cout << " -> symmetrized: " << art.n << " vars, " << art.m << " clauses";
  }
  std::cout << '\n';
  std::cout << "satisfying assignments s = " << sat << '\n';
  std::cout << "predicted optimal cost = " << format_rational(predicted) << " (~"
            << format_double(to_double(predicted)) << ")\n";

  json report;
  report["command"] = "reduce";
  report["argv"] = argv;
  report["input_vars"] = input.n_vars;
  report["input_clauses"] = input.clauses.size();
  report["symmetrized"] = symmetrized;
  report["vars"] = art.n;
  report["clauses"] = art.m;
  report["sat_count"] = sat;
  report["predicted_value"] = format_rational(predicted);

  if (art.n <= 3 && art.m <= 16) {
    const Rational searched = restricted_policy_search(art);
    const Rational reference = reduction_reference_value(art);
    std::cout << "searched optimal cost = " << format_rational(searched) << " (~"
              << format_double(to_double(searched)) << ")\n";
    std::cout << "constructive policy cost = " << format_rational(reference) << " (~"
              << format_double(to_double(reference)) << ")\n";
    std::cout << (searched == predicted ? "searched value matches the closed form\n"
                                        : "searched value differs from the closed form by "
                                              + format_rational(searched - predicted) + "\n");
    report["searched_value"] = format_rational(searched);
    report["constructive_value"] = format_rational(reference);
    report["matches_closed_form"] = searched == predicted;
  }

  if (!a.out.empty()) {
    save_instance(art.instance, a.out);
    json meta;
    meta["vars"] = art.n;
    meta["clauses"] = art.m;
    meta["capacity"] = format_rational(art.capacity());
    meta["penalty"] = format_rational(art.instance.penalty);
    meta["formula_dimacs"] = cnf_to_dimacs(art.formula);
    meta["digit_blocks"] = {
        {"total_digits", reduction_total_digits(art.n, art.m)},
        {"variable_powers", json::array()},
        {"mirror_powers", json::array()},
        {"equivalence_powers", json::array()},
        {"clause_powers", json::array()},
    };
    for (int i = 1; i <= art.n; ++i) {
      meta["digit_blocks"]["variable_powers"].push_back(var_digit_power(art.n, art.m, i));
      meta["digit_blocks"]["mirror_powers"].push_back(mirror_digit_power(art.n, art.m, i));
      meta["digit_blocks"]["equivalence_powers"].push_back(
          json::array({pos_equiv_digit_power(art.n, art.m, i), neg_equiv_digit_power(art.n, art.m, i)}));
    }
    for (int j = 1; j <= art.m; ++j) {
      meta["digit_blocks"]["clause_powers"].push_back(clause_digit_power(art.n, art.m, j));
    }
    json items = json::array();
    for (std::size_t idx = 0; idx < art.tags.size(); ++idx) {
      const ReductionTag& tag = art.tags[idx];
      json it;
      it["position"] = idx;
      it["role"] = role_name(tag.role);
      if (tag.role == ReductionRole::clause_slack) {
        it["clause"] = tag.index;
        it["slot"] = tag.slot;
      } else if (tag.role != ReductionRole::closer) {
        it["variable"] = tag.index;
      }
      const auto& atoms = art.instance.items[idx].fin().atoms;
      if (atoms.size() == 1) {
        it["value"] = format_rational(atoms[0].value);
      } else {
        it["value_true"] = format_rational(atoms[0].value);
        it["value_false"] = format_rational(atoms[1].value);
      }
      items.push_back(it);
    }
    meta["items"] = items;
    const std::string meta_path = a.meta.empty() ? a.out + ".meta.json" : a.meta;
    write_file(meta_path, meta.dump(2) + "\n");
    std::cout << "wrote " << a.out << " and " << meta_path << '\n';
    report["instance"] = instance_info(art.instance, a.out);
    report["meta_path"] = meta_path;
  }

  report["wall_clock_seconds"] = timer.seconds();
  maybe_write_report(a.report, report);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> argv_vec(argv, argv + argc);
  CLI::App app{"Adaptive bin packing laboratory"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "Build a named instance family");
  generate->add_option("name", gen.name, "family name")->required();
  generate->add_option("--n", gen.n, "sequence length");
  generate->add_option("--C", gen.penalty, "overflow penalty (exact rational text)");
  generate->add_option("--alpha", gen.alpha, "example3 parameter");
  generate->add_option("--n1", gen.n1, "exp_lower_bound block count");
  generate->add_option("--eps", gen.eps, "exp_lower_bound epsilon");
  generate->add_option("-o,--out", gen.out, "output instance path (default: stdout)");
  generate->add_option("--json", gen.report, "write a JSON run report");
  generate->callback([&] { run_generate(gen, argv_vec); });

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo policy evaluation");
  simulate->add_option("-i,--input", sim.input, "instance file")->required();
  simulate->add_option("-p,--policies", sim.policies,
                       "comma-separated policy specs (bg:<g>, fg, tg:<a>, ft:<a>, mdp)")
      ->required();
  simulate->add_option("--trials", sim.trials, "episodes per policy");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--prefix-sweep", sim.prefix_sweep,
                       "comma-separated prefix lengths (default: full length)");
  simulate->add_option("--workers", sim.workers, "worker threads (0 = ABP_WORKERS or hardware)");
  simulate->add_option("-o,--out", sim.out, "CSV output path (default: stdout)");
  simulate->add_option("--json", sim.report, "write a JSON run report");
  simulate->callback([&] { run_simulate(sim, argv_vec); });

  ExactArgs ex;
  CLI::App* exact = app.add_subcommand("exact", "Exact solvers for finite-law instances");
  exact->add_option("-i,--input", ex.input, "instance file")->required();
  exact->add_flag("--single-bin", ex.single_bin, "single-active-bin optimum (i.i.d. only)");
  exact->add_option("--budgeted", ex.budgeted,
                    "min expected opened bins under risk budget <gamma>/C (gamma text or sqrt2)");
  exact->add_flag("--self-check", ex.self_check,
                  "re-evaluate the extracted policy tree and compare (exit 4 on mismatch)");
  exact->add_option("--max-states", ex.max_states, "DP state cap");
  exact->add_option("--json", ex.report, "write a JSON run report");
  exact->callback([&] { run_exact(ex, argv_vec); });

  PtasArgs pt;
  CLI::App* ptas = app.add_subcommand("ptas", "Discretized DP and tracking executor");
  ptas->add_option("-i,--input", pt.input, "instance file")->required();
  ptas->add_option("--eps", pt.eps, "accuracy parameter (exact rational text)")->required();
  ptas->add_option("--grid", pt.grid, "grid override (must divide the small-size cutoff)");
  ptas->add_flag("--track", pt.track, "run the tracking executor on the original items");
  ptas->add_option("--trials", pt.trials, "tracking episodes");
  ptas->add_option("--seed", pt.seed, "master seed");
  ptas->add_option("--json", pt.report, "write a JSON run report");
  ptas->callback([&] { run_ptas(pt, argv_vec); });

  ThresholdArgs th;
  CLI::App* threshold = app.add_subcommand("threshold", "Value-iteration threshold extraction");
  threshold->add_option("-i,--input", th.input, "instance file")->required();
  threshold->add_option("--discount", th.discount, "discount factor in (0,1)");
  threshold->add_option("--tol", th.tol, "Bellman residual target");
  threshold->add_option("--json", th.report, "write a JSON run report");
  threshold->callback([&] { run_threshold(th, argv_vec); });

  ReduceArgs red;
  CLI::App* reduce = app.add_subcommand("reduce", "Counting reduction from a CNF formula");
  reduce->add_option("-f,--formula", red.formula, "DIMACS file (width-2 input is symmetrized)")
      ->required();
  reduce->add_option("--penalty", red.penalty, "overflow penalty (> 2)");
  reduce->add_option("-o,--out", red.out, "write the reduction instance here");
  reduce->add_option("--meta", red.meta, "sidecar metadata path (default: <out>.meta.json)");
  reduce->add_option("--json", red.report, "write a JSON run report");
  reduce->callback([&] { run_reduce(red, argv_vec); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.error_class());
  } catch (const std::logic_error& e) {
    std::cerr << "self-check failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
