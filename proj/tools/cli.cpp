#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "randcomp/bounds.hpp"
#include "randcomp/compress.hpp"
#include "randcomp/error.hpp"
#include "randcomp/io.hpp"
#include "randcomp/rng.hpp"
#include "randcomp/scenarios.hpp"
#include "randcomp/witness.hpp"

namespace randcomp::cli {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s) {
  const double v = parse_real(s);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw InvalidArgument("not a nonnegative integer: '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_real(p));
  return out;
}

// "uniform:K" or a comma-separated list of weights.
FinitePMF parse_pmf(const std::string& text) {
  if (text.rfind("uniform:", 0) == 0) return FinitePMF::uniform(parse_count(text.substr(8)));
  FinitePMF pmf(parse_reals(text));
  pmf.check("q");
  return pmf;
}

// "3x2,3x2" -> per-party (inputs, outputs).
std::vector<witness::PartyAlphabet> parse_alphabets(const std::string& text) {
  std::vector<witness::PartyAlphabet> out;
  for (const auto& item : split(text, ',')) {
    const auto dims = split(item, 'x');
    if (dims.size() != 2) throw InvalidArgument("alphabet must look like 3x2: '" + item + "'");
    out.push_back({parse_count(dims[0]), parse_count(dims[1])});
  }
  if (out.empty()) throw InvalidArgument("no party alphabets given");
  return out;
}

// "2:1,3:3" -> (h, m) pairs.
std::vector<std::pair<std::uint64_t, std::uint64_t>> parse_pairs(const std::string& text) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (const auto& item : split(text, ',')) {
    const auto hm = split(item, ':');
    if (hm.size() != 2) throw InvalidArgument("pair must look like H:M: '" + item + "'");
    out.emplace_back(parse_count(hm[0]), parse_count(hm[1]));
  }
  return out;
}

// "1:80" (unit step), "1:80:0.5", or a comma list.
std::vector<double> parse_xs(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_reals(text);
  const auto parts = split(text, ':');
  if (parts.size() < 2 || parts.size() > 3) throw InvalidArgument("range must be A:B[:STEP]");
  const double lo = parse_real(parts[0]);
  const double hi = parse_real(parts[1]);
  const double step = parts.size() == 3 ? parse_real(parts[2]) : 1.0;
  if (!(step > 0.0) || hi < lo) throw InvalidRange("bad x range");
  std::vector<double> xs;
  for (std::size_t i = 0;; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    if (x > hi + 1e-12) break;
    xs.push_back(x);
  }
  return xs;
}

std::uint64_t search_cap_from_env() {
  if (const char* env = std::getenv("RANDCOMP_SEARCH_CAP")) {
    return static_cast<std::uint64_t>(parse_count(env));
  }
  return witness::kDefaultSearchCap;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write " + path);
  f << text;
}

// Records every option given on the command line so `replay` can rebuild it.
void write_manifest(const CLI::App& sub, std::uint64_t seed,
                    const std::vector<std::string>& artifacts) {
  if (artifacts.empty()) return;
  json params = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->count() == 0 || opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    params[name] = opt->get_expected_max() == 0 ? json::array() : json(opt->results());
  }
  json manifest = {{"command", sub.get_name()},
                   {"parameters", params},
                   {"seed", seed},
                   {"artifact_paths", artifacts},
                   {"tool_version", kToolVersion}};
  io::write_json_file(artifacts.front() + ".manifest.json", manifest);
}

// ---------------------------------------------------------------------------

struct Options {
  // shared
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  // bounds
  std::string mode, figure, csv_path, deltas, xs = "1:80", pairs = "2:1,2:2,2:3,3:1,3:2,3:3";
  std::uint64_t x = 0, a = 0, h = 0, m = 0;
  double xa = 0.0;
  std::optional<double> eps;
  // scenario
  std::string name, q, out, target;
  std::size_t size = 32, outputs = 2;
  // compress / estimate / evaluate
  std::string net;
  std::vector<std::string> sources;
  std::vector<std::uint64_t> n;
  std::uint64_t max_attempts = 100, trials = 1000;
  bool force_sampling = false;
  std::string report;
  // verify-lower
  std::string builtin, alphabets;
  bool min = false;
  std::size_t m_max = 8;
  double tolerance = 1e-9;
  // replay
  std::string manifest;
};

int cmd_bounds(const Options& o, const CLI::App& sub, std::ostream& out) {
  if (!o.figure.empty()) {
    const auto xs = parse_xs(o.xs);
    bounds::FigureTable table;
    if (o.figure == "cardinality") {
      table = bounds::cardinality_figure(xs, o.eps.value_or(0.05));
    } else if (o.figure == "crossover") {
      table = bounds::crossover_figure(xs, parse_pairs(o.pairs));
    } else {
      throw InvalidArgument("--figure must be cardinality or crossover");
    }
    const std::string csv = bounds::to_csv(table);
    if (o.csv_path.empty()) {
      out << csv;
    } else {
      write_text(o.csv_path, csv);
      write_manifest(sub, 0, {o.csv_path});
      out << o.csv_path << '\n';
    }
    return kOk;
  }
  if (!o.csv_path.empty()) throw InvalidArgument("--csv needs --figure");
  auto need = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(std::string("missing ") + what);
  };
  if (o.mode == "single") {
    need(o.x && o.a && o.eps, "--x, --a and --eps");
    out << bounds::single_source_bound(o.x, o.a, *o.eps) << '\n';
  } else if (o.mode == "multi") {
    need(o.x && o.a && o.eps && (o.m || !o.deltas.empty()), "--x, --a, --eps and --m or --deltas");
    const auto deltas = o.deltas.empty() ? bounds::equal_split(o.m) : parse_reals(o.deltas);
    const auto ns = bounds::multi_source_bound(o.x, o.a, *o.eps, deltas);
    for (std::size_t i = 0; i < ns.size(); ++i) out << (i ? "," : "") << ns[i];
    out << '\n';
  } else if (o.mode == "general") {
    need(o.h && o.m && o.xa > 0 && o.eps, "--h, --m, --xa and --eps");
    out << bounds::general_equal_split_bound(o.h, o.xa, o.m, *o.eps) << '\n';
  } else if (o.mode == "exact") {
    need(o.h && o.xa > 0, "--h and --xa");
    if (o.xa != static_cast<double>(static_cast<std::uint64_t>(o.xa))) {
      throw InvalidArgument("--xa must be an integer for the exact bound");
    }
    out << bounds::exact_bound(o.h, static_cast<std::uint64_t>(o.xa)) << '\n';
  } else if (o.mode == "crossover") {
    need(o.h && o.m && o.xa > 0, "--h, --m and --xa");
    out << io::format_real(bounds::crossover_epsilon(o.h, o.m, o.xa)) << '\n';
  } else {
    throw InvalidArgument("--mode must be one of single, multi, general, exact, crossover");
  }
  return kOk;
}

int cmd_scenario(const Options& o, const CLI::App& sub, std::ostream& out) {
  std::optional<ConditionalDistribution> target;
  NetworkSpec spec;
  if (o.name == "correlated") {
    if (o.q.empty()) throw InvalidArgument("correlated scenario needs --q");
    auto inst = scenarios::build_correlated_no_input(o.h ? o.h : 2, parse_pmf(o.q));
    spec = std::move(inst.network);
    target = std::move(inst.target);
  } else if (o.name == "matching-xor") {
    if (o.x == 0) throw InvalidArgument("matching-xor scenario needs --x");
    spec = scenarios::xor_strategy_network(o.x);
    target = scenarios::target_matching_distribution(o.x);
  } else if (o.name == "triangle-demo") {
    spec = scenarios::triangle_demo(o.size, o.outputs, o.seed);
  } else {
    throw InvalidArgument("--name must be correlated, matching-xor or triangle-demo");
  }
  const ValidatedNetwork net = validate_network(std::move(spec));
  std::vector<std::string> artifacts;
  if (o.out.empty()) {
    out << io::network_to_json(net).dump(2) << '\n';
  } else {
    io::write_network_file(o.out, net);
    artifacts.push_back(o.out);
  }
  if (!o.target.empty()) {
    if (!target) throw InvalidArgument("this scenario has no target distribution");
    io::write_distribution_csv(std::filesystem::path(o.target), *target);
    artifacts.push_back(o.target);
  }
  write_manifest(sub, o.seed, artifacts);
  for (const auto& path : artifacts) out << path << '\n';
  return kOk;
}

int cmd_evaluate(const Options& o, const CLI::App& sub, std::ostream& out) {
  const ValidatedNetwork net = io::read_network_file(o.net);
  const ConditionalDistribution dist = evaluate(net);
  if (o.out.empty()) {
    io::write_distribution_csv(out, dist);
  } else {
    io::write_distribution_csv(std::filesystem::path(o.out), dist);
    write_manifest(sub, 0, {o.out});
    out << o.out << '\n';
  }
  return kOk;
}

int cmd_compress(const Options& o, const CLI::App& sub, std::ostream& out) {
  if (!o.eps) throw InvalidArgument("missing --eps");
  const ValidatedNetwork net = io::read_network_file(o.net);
  for (const auto& id : o.sources) {
    if (!net.source_index(id)) throw SourceNotFound("no source with id '" + id + "'");
  }

  json report = {{"tool_version", kToolVersion},
                 {"generator", std::string(rng::kGeneratorName)},
                 {"epsilon", *o.eps},
                 {"seed", o.seed}};
  std::vector<std::string> artifacts;
  auto emit_report = [&](const json& doc) {
    if (o.report.empty()) {
      out << doc.dump(2) << '\n';
    } else {
      io::write_json_file(o.report, doc);
      artifacts.push_back(o.report);
    }
  };

  MultiCompressionConfig cfg;
  cfg.epsilon = *o.eps;
  cfg.deltas = o.deltas.empty() ? std::vector<double>{} : parse_reals(o.deltas);
  cfg.n = o.n;
  cfg.max_attempts = o.max_attempts;
  cfg.seed = o.seed;
  cfg.force_sampling = o.force_sampling;
  cfg.jobs = o.jobs;
  try {
    MultiCompressionResult result;
    if (o.sources.size() == 1 && o.deltas.empty()) {
      CompressionConfig single;
      single.epsilon = cfg.epsilon;
      single.n = o.n.empty() ? bounds::single_source_bound(net.joint_inputs(), net.joint_outputs(),
                                                           cfg.epsilon)
                             : o.n.front();
      single.max_attempts = cfg.max_attempts;
      single.seed = cfg.seed;
      single.force_sampling = cfg.force_sampling;
      single.jobs = cfg.jobs;
      auto r = compress_single(net, o.sources.front(), single);
      result.final_deviation = r.report.achieved_deviation;
      result.reports.push_back(r.report);
      result.network = std::move(r.network);
    } else {
      result = compress_many(net, o.sources, cfg);
    }
    json stages = json::array();
    for (const auto& r : result.reports) stages.push_back(to_json(r));
    report["status"] = "ok";
    report["stages"] = std::move(stages);
    report["final_deviation"] = result.final_deviation;
    if (!o.out.empty()) {
      io::write_network_file(o.out, result.network);
      artifacts.push_back(o.out);
    }
    emit_report(report);
    write_manifest(sub, o.seed, artifacts);
    return kOk;
  } catch (const AttemptsExhausted& e) {
    json stages = json::array();
    for (const auto& r : e.completed()) stages.push_back(to_json(r));
    stages.push_back(to_json(e.report()));
    report["status"] = "attempts_exhausted";
    report["failed_stage"] = e.stage();
    report["stages"] = std::move(stages);
    report["best_deviation"] = e.report().achieved_deviation;
    emit_report(report);
    write_manifest(sub, o.seed, artifacts);
    return kNegative;
  }
}

int cmd_estimate(const Options& o, const CLI::App&, std::ostream& out) {
  if (!o.eps || o.sources.size() != 1 || o.n.size() != 1) {
    throw InvalidArgument("estimate needs --eps, one --source and one --n");
  }
  const ValidatedNetwork net = io::read_network_file(o.net);
  SuccessEstimateOptions opts;
  opts.force_sampling = o.force_sampling;
  opts.jobs = o.jobs;
  out << io::format_real(estimate_success_probability(net, o.sources.front(), o.n.front(), *o.eps,
                                                      o.trials, o.seed, opts))
      << '\n';
  return kOk;
}

int cmd_verify_lower(const Options& o, const CLI::App& sub, std::ostream& out) {
  ConditionalDistribution target;
  std::vector<witness::PartyAlphabet> alphabets;
  if (o.builtin == "correlated") {
    if (o.q.empty()) throw InvalidArgument("builtin correlated needs --q");
    const std::size_t h = o.h ? o.h : 2;
    const FinitePMF q = parse_pmf(o.q);
    target = scenarios::build_correlated_no_input(h, q).target;
    alphabets.assign(h, {1, q.size()});
  } else if (o.builtin == "matching") {
    if (o.x == 0) throw InvalidArgument("builtin matching needs --x");
    target = scenarios::target_matching_distribution(o.x);
    alphabets.assign(2, {o.x, 2});
  } else if (!o.builtin.empty()) {
    throw InvalidArgument("--builtin must be correlated or matching");
  } else {
    if (o.target.empty() || o.alphabets.empty()) {
      throw InvalidArgument("give --builtin, or --target with --alphabets");
    }
    target = io::read_distribution_csv(std::filesystem::path(o.target));
    alphabets = parse_alphabets(o.alphabets);
  }

  witness::SearchOptions opts;
  opts.step_cap = search_cap_from_env();
  opts.jobs = o.jobs;

  if (o.min) {
    const auto m = witness::min_cardinality(target, alphabets, o.m_max, o.tolerance, opts);
    if (!m) {
      out << "NONE up to m = " << o.m_max << '\n';
      return kNegative;
    }
    out << *m << '\n';
    return kOk;
  }
  if (o.m == 0) throw InvalidArgument("give --m or --min");
  const auto real = witness::deterministic_feasible({target, alphabets, o.m, o.tolerance}, opts);
  if (!real) {
    out << "INFEASIBLE\n";
    return kNegative;
  }
  out << "FEASIBLE";
  if (o.out.empty()) {
    out << '\n' << witness::to_json(*real).dump(2) << '\n';
  } else {
    io::write_json_file(o.out, witness::to_json(*real));
    write_manifest(sub, 0, {o.out});
    out << ' ' << o.out << '\n';
  }
  return kOk;
}

int cmd_replay(const Options& o, std::ostream& out, std::ostream& err) {
  const json manifest = io::read_json_file(o.manifest);
  std::vector<std::string> args{manifest.at("command").get<std::string>()};
  for (const auto& [name, values] : manifest.at("parameters").items()) {
    if (values.empty()) {
      args.push_back("--" + name);
      continue;
    }
    for (const auto& v : values) {
      args.push_back("--" + name);
      args.push_back(v.get<std::string>());
    }
  }
  return run(args, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shared-randomness compression toolkit", "randcomp"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Options o;

  auto* bounds_cmd = app.add_subcommand("bounds", "Cardinality bounds and figure data");
  bounds_cmd->add_option("--mode", o.mode, "single | multi | general | exact | crossover");
  bounds_cmd->add_option("--x", o.x, "|X| (joint inputs)");
  bounds_cmd->add_option("--a", o.a, "|A| (joint outputs)");
  bounds_cmd->add_option("--eps", o.eps, "Tolerance epsilon");
  bounds_cmd->add_option("--deltas", o.deltas, "Comma-separated delta split");
  bounds_cmd->add_option("--h", o.h, "Number of parties");
  bounds_cmd->add_option("--m", o.m, "Number of compressed sources");
  bounds_cmd->add_option("--xa", o.xa, "Per-party |X_i||A_i|");
  bounds_cmd->add_option("--figure", o.figure, "cardinality | crossover");
  bounds_cmd->add_option("--xs", o.xs, "x values: A:B[:STEP] or a comma list");
  bounds_cmd->add_option("--pairs", o.pairs, "Crossover (h,m) pairs, e.g. 2:1,3:3");
  bounds_cmd->add_option("--csv", o.csv_path, "Write figure data to this CSV");

  auto* scenario_cmd = app.add_subcommand("scenario", "Write a built-in scenario network");
  scenario_cmd->add_option("--name", o.name, "correlated | matching-xor | triangle-demo")->required();
  scenario_cmd->add_option("--h", o.h, "Parties (correlated)");
  scenario_cmd->add_option("--q", o.q, "Output PMF: uniform:K or p0,p1,...");
  scenario_cmd->add_option("--x", o.x, "Inputs per party (matching-xor)");
  scenario_cmd->add_option("--size", o.size, "Source size (triangle-demo)");
  scenario_cmd->add_option("--outputs", o.outputs, "Outputs per party (triangle-demo)");
  scenario_cmd->add_option("--seed", o.seed, "Seed (triangle-demo)");
  scenario_cmd->add_option("--out", o.out, "Network spec path");
  scenario_cmd->add_option("--target", o.target, "Target distribution CSV path");

  auto* eval_cmd = app.add_subcommand("evaluate", "Exact outcome table of a network");
  eval_cmd->add_option("--net", o.net, "Network spec")->required();
  eval_cmd->add_option("--out", o.out, "CSV path (stdout if omitted)");

  auto* compress_cmd = app.add_subcommand("compress", "Compress sources by empirical resampling");
  compress_cmd->add_option("--net", o.net, "Network spec")->required();
  compress_cmd->add_option("--source", o.sources, "Source id (repeat for several)")->required();
  compress_cmd->add_option("--eps", o.eps, "Total tolerance");
  compress_cmd->add_option("--seed", o.seed, "Master seed");
  compress_cmd->add_option("--n", o.n, "Samples per source (repeat per source)");
  compress_cmd->add_option("--deltas", o.deltas, "Comma-separated delta split");
  compress_cmd->add_option("--max-attempts", o.max_attempts, "Attempts per source");
  compress_cmd->add_flag("--force-sampling", o.force_sampling, "Resample even when n covers the support");
  compress_cmd->add_option("--jobs", o.jobs, "Worker threads");
  compress_cmd->add_option("--out", o.out, "Compressed network path");
  compress_cmd->add_option("--report", o.report, "Report JSON path (stdout if omitted)");

  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate single-attempt success probability");
  estimate_cmd->add_option("--net", o.net, "Network spec")->required();
  estimate_cmd->add_option("--source", o.sources, "Source id")->required();
  estimate_cmd->add_option("--n", o.n, "Samples")->required();
  estimate_cmd->add_option("--eps", o.eps, "Tolerance")->required();
  estimate_cmd->add_option("--trials", o.trials, "Independent trials");
  estimate_cmd->add_option("--seed", o.seed, "Master seed");
  estimate_cmd->add_flag("--force-sampling", o.force_sampling, "Resample even when n covers the support");
  estimate_cmd->add_option("--jobs", o.jobs, "Worker threads");

  auto* verify_cmd = app.add_subcommand("verify-lower", "Exact realizability by deterministic strategies");
  verify_cmd->add_option("--builtin", o.builtin, "correlated | matching");
  verify_cmd->add_option("--h", o.h, "Parties (correlated)");
  verify_cmd->add_option("--q", o.q, "Output PMF (correlated)");
  verify_cmd->add_option("--x", o.x, "Inputs per party (matching)");
  verify_cmd->add_option("--target", o.target, "Target distribution CSV");
  verify_cmd->add_option("--alphabets", o.alphabets, "Per-party IxO list, e.g. 3x2,3x2");
  verify_cmd->add_option("--m", o.m, "Candidate source cardinality");
  verify_cmd->add_flag("--min", o.min, "Search for the minimum cardinality");
  verify_cmd->add_option("--m-max", o.m_max, "Largest cardinality tried by --min");
  verify_cmd->add_option("--tolerance", o.tolerance, "Residual tolerance");
  verify_cmd->add_option("--jobs", o.jobs, "Worker threads");
  verify_cmd->add_option("--out", o.out, "Realization JSON path");

  auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay_cmd->add_option("--manifest", o.manifest, "Manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }

  try {
    if (*bounds_cmd) return cmd_bounds(o, *bounds_cmd, out);
    if (*scenario_cmd) return cmd_scenario(o, *scenario_cmd, out);
    if (*eval_cmd) return cmd_evaluate(o, *eval_cmd, out);
    if (*compress_cmd) return cmd_compress(o, *compress_cmd, out);
    if (*estimate_cmd) return cmd_estimate(o, *estimate_cmd, out);
    if (*verify_cmd) return cmd_verify_lower(o, *verify_cmd, out);
    if (*replay_cmd) return cmd_replay(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}

}  // namespace randcomp::cli
