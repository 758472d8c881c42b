// Acceptance suite.  Every criterion is reproduced through the command-line
// interface (one documented invocation per criterion, see the README table),
// its outputs parsed back and checked at the stated tolerance.  One PASS/FAIL
// line is printed per criterion.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/oracles.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Context {
  std::string cli;
  fs::path workdir;
};

struct Command {
  std::string args;   // everything except --out
  std::string output; // file name inside the criterion workdir
};

// The documented acceptance commands.  Criterion 10 reruns all of them with
// a different thread count and compares bytes.
const std::vector<std::pair<int, Command>> kCommands = {
    {1,
     {"meet --drift zero --u1 0 --u2 0.5 --horizon 1 --dt 1e-4 --reps 100000 "
      "--seed 101 --t 1",
      "c1_meet_zero.json"}},
    {2,
     {"meet --drift linear --C -1,0.5 --u1 0 --u2 0.5 --horizon 1 --dt 1e-4 "
      "--reps 100000 --seed 102 --t 0.25,0.5,1",
      "c2_meet_linear.json"}},
    {3,
     {"cluster --drift linear --C 1 --t 0.04,0.01,0.0025 --grid-m 200 "
      "--reps 20000 --method pair-quadrature --seed 103",
      "c3_cluster.json"}},
    {4,
     {"trotter --method compare --drift cosine --u1 0 --u2 0.3 "
      "--partition-N 4,16,64 --dt 1e-4 --reps 20000 --seed 104",
      "c4_compare.json"}},
    {5,
     {"trotter --method diagnostics --drift cosine,linear --C 1 --starts "
      "0,0.3 --partition-N 4,16 --dt 1e-4 --reps 10000 --seed 105",
      "c5_diagnostics.json"}},
    {6,
     {"trotter --method diagnostics --drift cosine --starts 0 "
      "--partition-N 16 --dt 1e-4 --reps 6400 --seed 106",
      "c6_diagnostics.json"}},
    {7,
     {"sandwich --drift cosine --u1 0 --u2 0.5 --gamma 1 --horizon 1 "
      "--dt 1e-4 --reps 10000 --seed 107",
      "c7_sandwich.json"}},
    {8,
     {"prop1 --n 4,16,64 --r 0.5 --s 0.25 --t 0.75 --reps 100000 --dt 1e-4 "
      "--seed 108",
      "c8_prop1.json"}},
    {8,
     {"prop1 --n 1 --r 0 --s 0 --t 1 --reps 100000 --dt 1e-4 --seed 108",
      "c8_prop1_sanity.json"}},
    {9,
     {"webtest --dt 1e-4 --reps 100000 --seed 110", "c9_webtest.json"}},
};

int run_shell(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json run_command(const Context& ctx, const Command& cmd, int threads = 0) {
  const fs::path out = ctx.workdir / cmd.output;
  std::string line;
  if (threads > 0) {
    line = "COALFLOW_THREADS=" + std::to_string(threads) + " ";
  }
  line += ctx.cli + " " + cmd.args + " --out " + out.string();
  const int code = run_shell(line);
  if (code != 0) {
    throw std::runtime_error("command failed (exit " + std::to_string(code) +
                             "): " + line);
  }
  std::ifstream in(out);
  return json::parse(in);
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail += (detail.empty() ? "" : "; ") + what + (ok ? " [ok]" : " [FAIL]");
  }
};

const Command& command_for(int criterion, std::size_t index = 0) {
  std::size_t seen = 0;
  for (const auto& [c, cmd] : kCommands) {
    if (c == criterion) {
      if (seen == index) return cmd;
      ++seen;
    }
  }
  throw std::runtime_error("no command for criterion");
}

Outcome criterion1(const Context& ctx) {
  const json summary = run_command(ctx, command_for(1));
  const json& run = summary.at("runs")[0];
  Outcome out;
  const double p = run.at("meet_probability").get<double>();
  const double oracle = coalflow::oracles::reflection_meet_cdf(0.5, 1.0);
  const double sigma = std::sqrt(oracle * (1.0 - oracle) / 1e5);
  out.require(std::abs(p - oracle) <= 3.0 * sigma,
              "meet prob " + fmt(p) + " vs " + fmt(oracle) + " within 3sigma=" +
                  fmt(3.0 * sigma));
  const double d = run.at("ks_conditioned").get<double>();
  out.require(d <= 0.015, "conditioned KS " + fmt(d) + " <= 0.015");
  return out;
}

Outcome criterion2(const Context& ctx) {
  const json summary = run_command(ctx, command_for(2));
  Outcome out;
  for (const json& run : summary.at("runs")) {
    const double c = run.at("C").get<double>();
    for (const json& point : run.at("survival")) {
      const double emp = point.at("empirical_survival").get<double>();
      const double oracle = point.at("oracle_survival").get<double>();
      const double se = point.at("stderr").get<double>();
      out.require(std::abs(emp - oracle) <= 3.0 * se,
                  "C=" + fmt(c) + " t=" + fmt(point.at("t").get<double>()) +
                      " survival " + fmt(emp) + " vs " + fmt(oracle));
    }
    const double d = run.at("ks_conditioned").get<double>();
    out.require(d <= 0.02, "C=" + fmt(c) + " KS " + fmt(d) + " <= 0.02");
  }
  return out;
}

Outcome criterion3(const Context& ctx) {
  const json summary = run_command(ctx, command_for(3));
  Outcome out;
  double ratio_smallest_t = 0.0;
  for (const json& row : summary.at("estimates")) {
    const double t = row.at("t").get<double>();
    const double value = row.at("value").get<double>();
    const double se = row.at("stderr").get<double>();
    const double oracle = row.at("oracle").get<double>();
    out.require(std::abs(value - oracle) <= 3.0 * se,
                "t=" + fmt(t) + " Enu " + fmt(value) + " vs oracle " +
                    fmt(oracle) + " (3se=" + fmt(3.0 * se) + ")");
    if (t == 0.0025) ratio_smallest_t = value / std::sqrt(t);
  }
  // Pinned constant sqrt(2/pi); the model's pair gap has variance rate 2,
  // for which the true small-t constant is 2/sqrt(pi) = 1.12838, so this
  // check fails by construction.  The informational line below reports the
  // corrected-constant comparison.
  out.require(std::abs(ratio_smallest_t - 0.79788) <= 0.05,
              "ratio Enu/sqrt(t) " + fmt(ratio_smallest_t) +
                  " within 0.05 of 0.79788");
  const double corrected = 2.0 / std::sqrt(M_PI);
  out.detail += "; info: vs corrected constant 2/sqrt(pi)=" + fmt(corrected) +
                " gap " + fmt(std::abs(ratio_smallest_t - corrected));
  return out;
}

Outcome criterion4(const Context& ctx) {
  const json summary = run_command(ctx, command_for(4));
  Outcome out;
  double prev = 1e9;
  double ks64 = 1.0, z64 = 1e9;
  for (const json& row : summary.at("comparisons")) {
    const int n = row.at("partition_n").get<int>();
    const double ks = row.at("ks_max").get<double>();
    out.require(ks <= prev, "KS(" + std::to_string(n) + ")=" + fmt(ks) +
                                " nonincreasing");
    prev = ks;
    if (n == 64) {
      ks64 = ks;
      z64 = row.at("meet_z").get<double>();
    }
  }
  out.require(ks64 <= 0.03, "KS(64) " + fmt(ks64) + " <= 0.03");
  out.require(std::abs(z64) <= 3.0,
              "meet probability z(64) " + fmt(z64) + " within 3");
  return out;
}

Outcome criterion5(const Context& ctx) {
  const json summary = run_command(ctx, command_for(5));
  Outcome out;
  for (const json& run : summary.at("runs")) {
    const auto reps = run.at("reps").get<std::uint64_t>();
    const auto ok = run.at("jump_bound_ok").get<std::uint64_t>();
    out.require(ok == reps,
                run.at("drift").get<std::string>() + " N=" +
                    std::to_string(run.at("partition_n").get<int>()) +
                    " jump bound on " + std::to_string(ok) + "/" +
                    std::to_string(reps));
    out.require(run.at("bookkeeping_identity").get<bool>(),
                "bookkeeping identity");
  }
  return out;
}

Outcome criterion6(const Context& ctx) {
  const json summary = run_command(ctx, command_for(6));
  Outcome out;
  const json& run = summary.at("runs")[0];
  const auto n = run.at("m_increments").get<std::uint64_t>();
  out.require(n >= 100000, "increments " + std::to_string(n) + " >= 1e5");
  const double mean_z = run.at("bm_mean_z").get<double>();
  out.require(std::abs(mean_z) <= 3.0, "mean z " + fmt(mean_z) + " within 3");
  const double vr = run.at("bm_variance_ratio").get<double>();
  out.require(vr >= 0.95 && vr <= 1.05,
              "variance ratio " + fmt(vr) + " in [0.95, 1.05]");
  const double lag = run.at("bm_lag1_corr").get<double>();
  out.require(std::abs(lag) <= 3.0 / std::sqrt(static_cast<double>(n)),
              "lag-1 corr " + fmt(lag) + " within 3/sqrt(n)");
  const double qv = run.at("bm_qv_mean").get<double>();
  out.require(std::abs(qv - 1.0) <= 0.02,
              "quadratic variation " + fmt(qv) + " within 2% of 1");
  return out;
}

Outcome criterion7(const Context& ctx) {
  const json summary = run_command(ctx, command_for(7));
  Outcome out;
  const auto reps = summary.at("reps").get<std::uint64_t>();
  const auto holds = summary.at("holds").get<std::uint64_t>();
  out.require(holds == reps, "sandwich pathwise on " + std::to_string(holds) +
                                 "/" + std::to_string(reps));
  out.require(summary.at("zero_case_bitwise").get<bool>(),
              "equality case C_a = 0 bitwise");
  return out;
}

Outcome criterion8(const Context& ctx) {
  const json summary = run_command(ctx, command_for(8, 0));
  Outcome out;
  double s4 = 0.0, s64 = 0.0, se64 = 0.0;
  for (const json& row : summary.at("estimates")) {
    const int n = row.at("n").get<int>();
    if (n == 4) s4 = row.at("estimate").get<double>();
    if (n == 64) {
      s64 = row.at("estimate").get<double>();
      se64 = row.at("stderr").get<double>();
    }
  }
  out.require(std::abs(s64) <= std::abs(s4),
              "|S(64)|=" + fmt(std::abs(s64)) + " <= |S(4)|=" +
                  fmt(std::abs(s4)));
  // The true S(64) at these parameters is ~0.038 (decay rate ~n^{-1/2}),
  // an order of magnitude above the 3-sigma band at 1e5 replicas; this
  // pinned clause fails by construction.
  out.require(std::abs(s64) <= 3.0 * se64,
              "S(64) " + fmt(s64) + " within 3se=" + fmt(3.0 * se64) +
                  " of 0");

  const json sanity = run_command(ctx, command_for(8, 1));
  const json& row = sanity.at("estimates")[0];
  const double s1 = row.at("estimate").get<double>();
  const double se1 = row.at("stderr").get<double>();
  out.require(std::abs(s1 - 1.0) <= 3.0 * se1,
              "sanity n=1 estimate " + fmt(s1) + " within 3se of 1");
  return out;
}

Outcome criterion9(const Context& ctx) {
  const json summary = run_command(ctx, command_for(9));
  Outcome out;
  const json& oracle = summary.at("oracle_selfcheck");
  out.require(oracle.at("l_dual_max_gap").get<double>() <= 1e-8,
              "l dual-route gap " +
                  fmt(oracle.at("l_dual_max_gap").get<double>()) + " <= 1e-8");
  out.require(oracle.at("l_bounds_ok").get<bool>(),
              "l <= min(t, upper bound)");
  out.require(oracle.at("phi_quad_max_gap").get<double>() <= 1e-10,
              "phi vs quadrature <= 1e-10");
  out.require(oracle.at("ecs_quad_max_gap").get<double>() <= 1e-8,
              "cluster-size closed form vs 2-D quadrature <= 1e-8");
  out.require(oracle.at("monotonicity_ok").get<bool>(), "oracle monotonicity");
  const double z = summary.at("product_z").get<double>();
  out.require(std::abs(z) <= 3.0,
              "E[product] vs l(1,1) z=" + fmt(z) + " within 3");
  out.require(summary.at("composition_bitwise_ok").get<bool>(),
              "flow composition bitwise");
  out.require(summary.at("noncrossing_ok").get<bool>(), "non-crossing");
  out.require(summary.at("coalescence_bitwise_ok").get<bool>(),
              "coalescence absorbing bitwise");
  return out;
}

Outcome criterion10(const Context& ctx) {
  Outcome out;
  for (const auto& [criterion, cmd] : kCommands) {
    // canonical output: the run the criterion itself performed (default
    // thread count); regenerate when running this criterion stand-alone
    if (!fs::exists(ctx.workdir / cmd.output)) run_command(ctx, cmd);
    Command rerun = cmd;
    rerun.output = "c10_" + cmd.output;
    run_command(ctx, rerun, 3);
    std::ifstream a(ctx.workdir / cmd.output, std::ios::binary);
    std::ifstream b(ctx.workdir / rerun.output, std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    out.require(sa.str() == sb.str() && !sa.str().empty(),
                cmd.output + " byte-identical across thread counts");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  int criterion = 0;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") ctx.cli = argv[i + 1];
    if (flag == "--workdir") ctx.workdir = argv[i + 1];
    if (flag == "--criterion") criterion = std::atoi(argv[i + 1]);
  }
  if (ctx.cli.empty() || ctx.workdir.empty()) {
    std::cerr << "usage: coalflow_acceptance --cli <binary> --workdir <dir> "
                 "[--criterion N]\n";
    return 2;
  }
  fs::create_directories(ctx.workdir);

  using CriterionFn = Outcome (*)(const Context&);
  const CriterionFn criteria[10] = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};

  int failures = 0;
  for (int c = 1; c <= 10; ++c) {
    if (criterion != 0 && criterion != c) continue;
    Outcome outcome;
    try {
      outcome = criteria[c - 1](ctx);
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    std::cout << "CRITERION " << c << ": "
              << (outcome.pass ? "PASS" : "FAIL") << " — " << outcome.detail
              << "\n";
    failures += outcome.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
