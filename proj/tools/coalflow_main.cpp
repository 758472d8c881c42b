// coalflow command-line front end.  One subcommand per experiment; every run
// with --out writes a manifest beside its output, and identical argv + seed
// reproduce output files byte for byte regardless of COALFLOW_THREADS.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coalflow/coalflow.h"

using json = nlohmann::ordered_json;

namespace {

struct RunHandle {
  coalflow_run* run = nullptr;
  ~RunHandle() { coalflow_run_destroy(run); }
};

struct DriftHandle {
  coalflow_drift* drift = nullptr;
  ~DriftHandle() { coalflow_drift_destroy(drift); }
};

[[noreturn]] void fail(const std::string& message) {
  throw std::runtime_error(message);
}

void check(coalflow_status status, const char* what) {
  if (status != COALFLOW_OK) {
    fail(std::string(what) + ": " + coalflow_last_error());
  }
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) fail("empty list: '" + text + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_double_list(text)) out.push_back(static_cast<int>(v));
  return out;
}

std::vector<std::string> parse_string_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) fail("empty list: '" + text + "'");
  return out;
}

std::string now_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

int default_threads() {
  const char* env = std::getenv("COALFLOW_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  return std::atoi(env);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot open output file '" + path + "'");
  out << content;
  if (!out) fail("failed writing '" + path + "'");
}

// Shared flag values; every subcommand reads the subset it uses.
struct Options {
  std::uint64_t seed = 0;
  std::uint64_t reps = 10000;
  double dt = 1e-4;
  bool dt_given = false;
  double horizon = 1.0;
  std::string out;
  std::string format = "json";
  int threads = default_threads();
  std::string drift = "zero";
  double c = 1.0;
  std::string c_list;
  double u1 = 0.0;
  double u2 = 0.5;
  std::string t_list = "1";
  std::string n_list = "4";
  std::string partition_list = "16";
  int grid_m = 200;
  std::string method;
  double r = 0.5;
  double s = 0.25;
  double gamma = 1.0;
  std::string starts;
  std::string what;
  double u = 1.0;
  double x = 0.0;
  std::string manifest_path;
};

DriftHandle make_drift(const std::string& kind, double c) {
  DriftHandle handle;
  std::vector<double> params;
  if (kind == "linear" || kind == "scaled-tanh") params.push_back(c);
  check(coalflow_drift_create(kind.c_str(), params.data(), params.size(),
                              &handle.drift),
        "drift");
  return handle;
}

struct CommandOutput {
  std::string primary;                 // content written to --out
  json summary;                        // always available
};

using CommandFn = CommandOutput (*)(const Options&);

json run_summary_json(const coalflow_run* run) {
  return json::parse(coalflow_run_summary(run));
}

std::string document_named(const coalflow_run* run, const std::string& name) {
  for (size_t i = 0; i < coalflow_run_document_count(run); ++i) {
    if (name == coalflow_run_document_name(run, i)) {
      return coalflow_run_document_content(run, i);
    }
  }
  fail("run produced no document named '" + name + "'");
}

CommandOutput cmd_oracle(const Options& opt) {
  double value = 0.0;
  json out;
  out["what"] = opt.what;
  if (opt.what == "phi") {
    check(coalflow_oracle_phi_c(opt.c, parse_double_list(opt.t_list)[0], &value),
          "oracle phi");
    out["C"] = opt.c;
    out["t"] = parse_double_list(opt.t_list)[0];
  } else if (opt.what == "survival") {
    check(coalflow_oracle_meeting_survival_linear(
              opt.c, opt.u1, opt.u2, parse_double_list(opt.t_list)[0], &value),
          "oracle survival");
    out["C"] = opt.c;
    out["u1"] = opt.u1;
    out["u2"] = opt.u2;
    out["t"] = parse_double_list(opt.t_list)[0];
  } else if (opt.what == "never") {
    check(coalflow_oracle_meeting_never_prob_linear(opt.c, opt.u1, opt.u2,
                                                    &value),
          "oracle never");
    out["C"] = opt.c;
    out["u1"] = opt.u1;
    out["u2"] = opt.u2;
  } else if (opt.what == "l") {
    check(coalflow_oracle_l_defect(parse_double_list(opt.t_list)[0], opt.u,
                                   &value),
          "oracle l");
    out["t"] = parse_double_list(opt.t_list)[0];
    out["u"] = opt.u;
  } else if (opt.what == "lbound") {
    check(coalflow_oracle_l_upper_bound(parse_double_list(opt.t_list)[0],
                                        opt.u, &value),
          "oracle lbound");
    out["t"] = parse_double_list(opt.t_list)[0];
    out["u"] = opt.u;
  } else if (opt.what == "cluster") {
    check(coalflow_oracle_expected_cluster_size_linear(
              opt.c, parse_double_list(opt.t_list)[0], &value),
          "oracle cluster");
    out["C"] = opt.c;
    out["t"] = parse_double_list(opt.t_list)[0];
  } else if (opt.what == "normcdf") {
    check(coalflow_oracle_normal_cdf(opt.x, &value), "oracle normcdf");
    out["x"] = opt.x;
  } else {
    fail("unknown --what '" + opt.what +
         "' (phi|survival|never|l|lbound|cluster|normcdf)");
  }
  out["value"] = value;
  CommandOutput result;
  result.summary = out;
  result.primary = out.dump(2) + "\n";
  return result;
}

CommandOutput cmd_meet(const Options& opt) {
  const std::vector<double> ts =
      opt.t_list.empty() ? std::vector<double>{} : parse_double_list(opt.t_list);
  json runs = json::array();
  std::string csv;
  const bool linear = opt.drift == "linear";
  // --C may carry a list only for the linear drift
  const std::vector<double> c_values =
      opt.c_list.empty() ? std::vector<double>{opt.c}
                         : parse_double_list(opt.c_list);
  if (!linear && c_values.size() > 1) {
    fail("--C lists are only meaningful for the linear drift");
  }
  if (opt.format == "csv" && c_values.size() > 1) {
    fail("csv format supports a single --C value");
  }
  for (double c : c_values) {
    DriftHandle drift = make_drift(opt.drift, c);
    RunHandle run;
    check(coalflow_run_meet(drift.drift, opt.u1, opt.u2, opt.horizon, opt.dt,
                            ts.data(), ts.size(), opt.reps, opt.seed,
                            opt.threads, &run.run),
          "meet");
    json summary = run_summary_json(run.run);
    if (linear) summary["C"] = c;
    runs.push_back(summary);
    csv = document_named(run.run, "samples.csv");
  }
  CommandOutput result;
  result.summary = json{{"command", "meet"}, {"runs", runs}};
  result.primary =
      opt.format == "csv" ? csv : result.summary.dump(2) + "\n";
  return result;
}

CommandOutput cmd_cluster(const Options& opt) {
  DriftHandle drift = make_drift(opt.drift, opt.c);
  const std::vector<double> ts = parse_double_list(opt.t_list);
  const std::string method = opt.method.empty() ? "pair-quadrature" : opt.method;
  // without an explicit --dt each t gets the documented default t/400
  const double dt = opt.dt_given ? opt.dt : 0.0;
  RunHandle run;
  check(coalflow_run_cluster(drift.drift, ts.data(), ts.size(), opt.grid_m,
                             opt.reps, dt, method.c_str(), opt.seed,
                             opt.threads, &run.run),
        "cluster");
  CommandOutput result;
  result.summary = run_summary_json(run.run);
  result.primary = opt.format == "csv" ? document_named(run.run, "cluster.csv")
                                       : result.summary.dump(2) + "\n";
  return result;
}

std::vector<double> starts_of(const Options& opt) {
  if (!opt.starts.empty()) return parse_double_list(opt.starts);
  return {opt.u1, opt.u2};
}

CommandOutput cmd_trotter(const Options& opt) {
  const std::string method = opt.method.empty() ? "record" : opt.method;
  const std::vector<int> ns = parse_int_list(opt.partition_list);
  CommandOutput result;
  if (method == "record") {
    DriftHandle drift = make_drift(opt.drift, opt.c);
    const std::vector<double> starts = starts_of(opt);
    RunHandle run;
    check(coalflow_run_trotter_record(drift.drift, starts.data(),
                                      starts.size(), ns[0], opt.dt, opt.seed,
                                      &run.run),
          "trotter record");
    result.summary = run_summary_json(run.run);
    result.primary = opt.format == "csv"
                         ? document_named(run.run, "record.csv")
                         : result.summary.dump(2) + "\n";
    return result;
  }
  if (method == "compare") {
    DriftHandle drift = make_drift(opt.drift, opt.c);
    RunHandle run;
    check(coalflow_run_trotter_compare(drift.drift, opt.u1, opt.u2, ns.data(),
                                       ns.size(), opt.dt, opt.reps, opt.seed,
                                       opt.threads, &run.run),
          "trotter compare");
    result.summary = run_summary_json(run.run);
    result.primary = result.summary.dump(2) + "\n";
    return result;
  }
  if (method == "diagnostics") {
    json runs = json::array();
    const std::vector<double> starts =
        opt.starts.empty() ? std::vector<double>{0.0}
                           : parse_double_list(opt.starts);
    for (const std::string& kind : parse_string_list(opt.drift)) {
      DriftHandle drift = make_drift(kind, opt.c);
      for (int n : ns) {
        RunHandle run;
        check(coalflow_run_trotter_diagnostics(drift.drift, starts.data(),
                                               starts.size(), n, opt.dt,
                                               opt.reps, opt.seed, opt.threads,
                                               &run.run),
              "trotter diagnostics");
        runs.push_back(run_summary_json(run.run));
      }
    }
    result.summary = json{{"command", "trotter-diagnostics"}, {"runs", runs}};
    result.primary = result.summary.dump(2) + "\n";
    return result;
  }
  fail("unknown --method '" + method + "' (record|compare|diagnostics)");
}

CommandOutput cmd_prop1(const Options& opt) {
  const std::vector<int> ns = parse_int_list(opt.n_list);
  const double t = parse_double_list(opt.t_list)[0];
  RunHandle run;
  check(coalflow_run_prop1(ns.data(), ns.size(), opt.r, opt.s, t, opt.reps,
                           opt.dt, opt.seed, opt.threads, &run.run),
        "prop1");
  CommandOutput result;
  result.summary = run_summary_json(run.run);
  result.primary = result.summary.dump(2) + "\n";
  return result;
}

CommandOutput cmd_sandwich(const Options& opt) {
  DriftHandle drift = make_drift(opt.drift, opt.c);
  RunHandle run;
  check(coalflow_run_sandwich(drift.drift, opt.u1, opt.u2, opt.gamma,
                              opt.horizon, opt.dt, opt.reps, opt.seed,
                              opt.threads, &run.run),
        "sandwich");
  CommandOutput result;
  result.summary = run_summary_json(run.run);
  result.primary = opt.format == "csv"
                       ? document_named(run.run, "sandwich.csv")
                       : result.summary.dump(2) + "\n";
  return result;
}

CommandOutput cmd_webtest(const Options& opt) {
  CommandOutput result;
  if (opt.method == "record") {
    const std::vector<double> starts = starts_of(opt);
    RunHandle run;
    check(coalflow_run_web_record(starts.data(), starts.size(), opt.horizon,
                                  opt.dt, opt.seed, &run.run),
          "web record");
    result.summary = run_summary_json(run.run);
    result.primary = opt.format == "csv"
                         ? document_named(run.run, "paths.csv")
                         : result.summary.dump(2) + "\n";
    return result;
  }
  RunHandle run;
  check(coalflow_run_webtest(opt.dt, opt.reps, opt.seed, opt.threads, &run.run),
        "webtest");
  result.summary = run_summary_json(run.run);
  result.primary = result.summary.dump(2) + "\n";
  return result;
}

}  // namespace

static int dispatch(std::vector<std::string> args);

namespace {

CommandOutput cmd_rerun(const Options& opt) {
  std::ifstream in(opt.manifest_path);
  if (!in) fail("cannot read manifest '" + opt.manifest_path + "'");
  json manifest = json::parse(in);
  std::vector<std::string> args;
  for (const auto& a : manifest.at("argv")) {
    args.push_back(a.get<std::string>());
  }
  if (args.empty()) fail("manifest has an empty argv");
  args.erase(args.begin());  // program name
  const int code = dispatch(args);
  if (code != 0) fail("rerun failed with exit code " + std::to_string(code));
  CommandOutput result;
  result.summary = json{{"command", "rerun"}, {"exit", 0}};
  result.primary = result.summary.dump(2) + "\n";
  return result;
}

}  // namespace

static int dispatch(std::vector<std::string> args) {
  CLI::App app{"coalflow: coalescing stochastic flow simulation laboratory"};
  app.require_subcommand(1);

  Options opt;
  std::string config_path;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.seed, "master seed");
    cmd->add_option("--reps", opt.reps, "replica count");
    cmd->add_option("--dt", opt.dt, "maximum step size")
        ->each([&](const std::string&) { opt.dt_given = true; });
    cmd->add_option("--horizon", opt.horizon, "time horizon");
    cmd->add_option("--out", opt.out, "output file path");
    cmd->add_option("--format", opt.format, "output format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--threads", opt.threads,
                    "worker threads (default COALFLOW_THREADS or all)");
    cmd->add_option("--config", config_path,
                    "JSON file of flag defaults (flat name->value map)");
  };

  CLI::App* oracle = app.add_subcommand("oracle", "print a closed-form value");
  add_common(oracle);
  oracle->add_option("--what", opt.what,
                     "phi|survival|never|l|lbound|cluster|normcdf")
      ->required();
  oracle->add_option("--C", opt.c, "drift constant");
  oracle->add_option("--u1", opt.u1, "left start");
  oracle->add_option("--u2", opt.u2, "right start");
  oracle->add_option("--t", opt.t_list, "time (single value)");
  oracle->add_option("--u", opt.u, "pair distance");
  oracle->add_option("--x", opt.x, "normal CDF argument");

  CLI::App* meet = app.add_subcommand("meet", "pairwise first-meeting runs");
  add_common(meet);
  meet->add_option("--drift", opt.drift, "zero|linear|cosine|scaled-tanh");
  meet->add_option("--C", opt.c_list,
                   "drift constant(s); list allowed for linear");
  meet->add_option("--u1", opt.u1, "left start");
  meet->add_option("--u2", opt.u2, "right start");
  meet->add_option("--t", opt.t_list, "survival report times (list)");

  CLI::App* cluster = app.add_subcommand("cluster", "cluster-size estimates");
  add_common(cluster);
  cluster->add_option("--drift", opt.drift, "drift kind");
  cluster->add_option("--C", opt.c, "drift constant");
  cluster->add_option("--t", opt.t_list, "times (list)")->required();
  cluster->add_option("--grid-m", opt.grid_m, "quadrature / fan grid size");
  cluster->add_option("--method", opt.method, "pair-quadrature|fan");

  CLI::App* trotter =
      app.add_subcommand("trotter", "fractional-step scheme runs");
  add_common(trotter);
  trotter->add_option("--drift", opt.drift,
                      "drift kind (diagnostics: comma list)");
  trotter->add_option("--C", opt.c, "drift constant");
  trotter->add_option("--u1", opt.u1, "first start");
  trotter->add_option("--u2", opt.u2, "second start");
  trotter->add_option("--starts", opt.starts, "explicit starts (list)");
  trotter->add_option("--partition-N", opt.partition_list,
                      "partition sizes (list)");
  trotter->add_option("--method", opt.method, "record|compare|diagnostics");

  CLI::App* prop1 = app.add_subcommand("prop1", "correlation-decay estimate");
  add_common(prop1);
  prop1->add_option("--n", opt.n_list, "grid sizes (list)");
  prop1->add_option("--r", opt.r, "probe start position");
  prop1->add_option("--s", opt.s, "probe birth time");
  prop1->add_option("--t", opt.t_list, "probe eval time");

  CLI::App* sandwich = app.add_subcommand("sandwich", "pathwise gap bounds");
  add_common(sandwich);
  sandwich->add_option("--drift", opt.drift, "drift kind");
  sandwich->add_option("--C", opt.c, "drift constant");
  sandwich->add_option("--u1", opt.u1, "left start");
  sandwich->add_option("--u2", opt.u2, "right start");
  sandwich->add_option("--gamma", opt.gamma, "noise amplitude");

  CLI::App* webtest = app.add_subcommand("webtest", "web invariant battery");
  add_common(webtest);
  webtest->add_option("--method", opt.method, "battery|record");
  webtest->add_option("--u1", opt.u1, "first start (record)");
  webtest->add_option("--u2", opt.u2, "second start (record)");
  webtest->add_option("--starts", opt.starts, "explicit starts (record)");

  CLI::App* rerun = app.add_subcommand("rerun", "re-execute from a manifest");
  rerun->add_option("--manifest", opt.manifest_path, "manifest path")
      ->required();

  // Config-file defaults: inject "--key value" for keys absent from argv.
  {
    std::string cfg;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--config") cfg = args[i + 1];
    }
    if (!cfg.empty()) {
      std::ifstream in(cfg);
      if (!in) {
        std::cerr << "error: cannot read config '" << cfg << "'\n";
        return 2;
      }
      json config = json::parse(in, nullptr, false);
      if (config.is_discarded() || !config.is_object()) {
        std::cerr << "error: config must be a flat JSON object\n";
        return 2;
      }
      for (const auto& [key, value] : config.items()) {
        const std::string flag = "--" + key;
        bool present = false;
        for (const auto& a : args) present = present || a == flag;
        if (present) continue;
        args.push_back(flag);
        args.push_back(value.is_string() ? value.get<std::string>()
                                         : value.dump());
      }
    }
  }

  // CLI11 parses right to left.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      std::cout << app.help();
      return 0;
    }
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return 2;
  }

  static const std::map<std::string, CommandFn> commands = {
      {"oracle", cmd_oracle},     {"meet", cmd_meet},
      {"cluster", cmd_cluster},   {"trotter", cmd_trotter},
      {"prop1", cmd_prop1},       {"sandwich", cmd_sandwich},
      {"webtest", cmd_webtest},   {"rerun", cmd_rerun}};

  const std::string name = app.get_subcommands().front()->get_name();
  const std::string started = now_utc();
  CommandOutput output;
  try {
    output = commands.at(name)(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (opt.out.empty()) {
    std::cout << output.primary;
    return 0;
  }
  try {
    write_file(opt.out, output.primary);
    json manifest;
    manifest["command"] = name;
    std::vector<std::string> argv_echo = {"coalflow"};
    argv_echo.insert(argv_echo.end(), args.begin(), args.end());
    manifest["argv"] = argv_echo;
    json params;
    for (const auto* option : app.get_subcommands().front()->get_options()) {
      if (option->count() > 0 && !option->get_lnames().empty()) {
        params[option->get_lnames().front()] = option->results().front();
      }
    }
    manifest["params"] = params;
    manifest["master_seed"] = opt.seed;
    manifest["artifact_version"] = coalflow_version();
    manifest["started_utc"] = started;
    manifest["finished_utc"] = now_utc();
    manifest["outputs"] = json::array({opt.out});
    write_file(opt.out + ".manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(std::move(args));
}
