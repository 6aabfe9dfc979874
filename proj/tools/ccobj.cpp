#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccobj/checker.hpp"
#include "ccobj/errors.hpp"
#include "ccobj/sim.hpp"
#include "ccobj/trace.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ccobj::ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ccobj::ParseError(what + ": " + e.what());
  }
}

ccobj::Verdict run_check(const ccobj::TraceFile& trace, const ccobj::History& h,
                         const std::string& condition, const ccobj::CheckLimits& lim) {
  if (condition == "causal") return ccobj::check_causal(h, lim);
  if (condition == "causal-cert") {
    size_t ops = 0, with_vc = 0, with_gseq = 0;
    for (const ccobj::TraceEvent& e : trace.events)
      if (e.op) {
        ++ops;
        if (e.op->vclock) ++with_vc;
        if (e.op->gseq) ++with_gseq;
      }
    ccobj::EdgeSet edges;
    if (ops > 0 && with_vc == ops)
      edges = trace.vclock_edges();
    else if (ops > 0 && with_gseq == ops)
      edges = trace.gseq_edges();
    else if (ops > 0)
      throw ccobj::MissingTimestamps(
          "causal-cert needs a vector clock or a stamp on every operation");
    return ccobj::check_causal_certificate(h, edges, lim);
  }
  if (condition == "causal-memory") return ccobj::check_causal_memory(h, lim);
  if (condition == "sequential") return ccobj::check_sequential(h, lim);
  if (condition == "linearizable") return ccobj::check_linearizable(h, lim);
  throw ccobj::DomainError("unknown condition " + condition);
}

void print_verdict(const ccobj::Verdict& v, bool as_json) {
  if (as_json) {
    std::cout << v.to_json().dump(2) << "\n";
    return;
  }
  std::cout << v.condition << ": "
            << (v.unknown ? "unknown" : v.accepted ? "accepted" : "rejected") << "\n";
  for (const std::string& d : v.diagnostics) std::cout << "  " << d << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"replicated-object consistency workbench"};
  app.require_subcommand(1);

  auto* cmd_run = app.add_subcommand("run", "run a scenario and emit its trace");
  std::string scenario_path, out_path;
  cmd_run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  cmd_run->add_option("-o,--out", out_path, "write the trace here instead of stdout");

  auto* cmd_check = app.add_subcommand("check", "check a trace against a condition");
  std::string trace_path;
  std::string condition = "causal";
  std::size_t max_ops = 0;
  bool as_json = false;
  cmd_check->add_option("trace", trace_path, "trace JSON file")->required();
  cmd_check
      ->add_option("--condition", condition,
                   "causal, causal-cert, causal-memory, sequential, or linearizable")
      ->check(CLI::IsMember(
          {"causal", "causal-cert", "causal-memory", "sequential", "linearizable"}));
  cmd_check->add_option("--max-ops", max_ops, "override the per-condition operation cap");
  cmd_check->add_flag("--json", as_json, "print the full verdict as JSON");

  auto* cmd_fuzz =
      app.add_subcommand("fuzz", "run seeded random scenarios and check every trace");
  int procs = 3, ops = 3;
  std::string object = "register", seeds = "1..25", fuzz_mode = "causal",
              fuzz_condition = "causal-cert";
  bool cwf = false, fuzz_json = false;
  std::size_t fuzz_max_ops = 0;
  cmd_fuzz->add_option("--procs", procs, "number of processes")->check(CLI::PositiveNumber);
  cmd_fuzz->add_option("--ops", ops, "operations per process")->check(CLI::NonNegativeNumber);
  cmd_fuzz->add_option("--object", object, "catalog name, e.g. register or stack");
  cmd_fuzz->add_option("--seeds", seeds, "seed range A..B (or a single seed)");
  cmd_fuzz->add_option("--mode", fuzz_mode, "causal or total")
      ->check(CLI::IsMember({"causal", "total"}));
  cmd_fuzz->add_option("--condition", fuzz_condition, "condition to check each trace against")
      ->check(CLI::IsMember(
          {"causal", "causal-cert", "causal-memory", "sequential", "linearizable"}));
  cmd_fuzz->add_flag("--cwf", cwf, "single writer: only process 1 writes registers");
  cmd_fuzz->add_option("--max-ops", fuzz_max_ops, "override the per-condition operation cap");
  cmd_fuzz->add_flag("--json", fuzz_json, "print each non-accepting verdict as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cmd_run) {
      ccobj::Scenario sc =
          ccobj::Scenario::from_json(parse_json(read_file(scenario_path), scenario_path));
      ccobj::SimResult res = ccobj::run_scenario(sc);
      std::string text = res.trace.to_json().dump(2) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw ccobj::ParseError("cannot write " + out_path);
        out << text;
      }
      return 0;
    }

    if (*cmd_check) {
      ccobj::TraceFile trace =
          ccobj::TraceFile::from_json(parse_json(read_file(trace_path), trace_path));
      ccobj::History h = trace.to_history();
      ccobj::CheckLimits lim;
      lim.max_ops = max_ops;
      ccobj::Verdict v = run_check(trace, h, condition, lim);
      print_verdict(v, as_json);
      return v.exit_code();
    }

    if (*cmd_fuzz) {
      uint64_t lo = 0, hi = 0;
      size_t dots = seeds.find("..");
      lo = std::stoull(seeds.substr(0, dots));
      hi = dots == std::string::npos ? lo : std::stoull(seeds.substr(dots + 2));
      if (hi < lo) throw ccobj::ParseError("seed range is empty: " + seeds);
      size_t accepted = 0, rejected = 0, unknown = 0;
      for (uint64_t seed = lo; seed <= hi; ++seed) {
        ccobj::Scenario sc;
        sc.name = "fuzz-" + object + "-" + std::to_string(seed);
        sc.n = procs;
        sc.mode = fuzz_mode;
        sc.seed = seed;
        sc.objects = {{"O", object}};
        ccobj::RandomScript r;
        r.ops_per_proc = ops;
        r.start = 1;
        r.spacing_min = 1;
        r.spacing_max = 6;
        r.concurrent_write_free = cwf;
        sc.random = r;
        sc.net.delay_min = 1;
        sc.net.delay_max = 3;
        ccobj::SimResult res = ccobj::run_scenario(sc);
        ccobj::History h = res.trace.to_history();
        ccobj::CheckLimits lim;
        lim.max_ops = fuzz_max_ops;
        ccobj::Verdict v = run_check(res.trace, h, fuzz_condition, lim);
        if (v.unknown) {
          ++unknown;
          std::cout << "seed " << seed << ": unknown\n";
        } else if (!v.accepted) {
          ++rejected;
          std::cout << "seed " << seed << ": rejected\n";
          if (fuzz_json)
            std::cout << v.to_json().dump(2) << "\n";
          else
            for (const std::string& d : v.diagnostics) std::cout << "  " << d << "\n";
        } else {
          ++accepted;
        }
      }
      std::cout << "seeds " << lo << ".." << hi << " (" << fuzz_condition << ", " << fuzz_mode
                << " " << object << "): " << accepted << " accepted, " << rejected
                << " rejected, " << unknown << " unknown\n";
      return rejected == 0 ? 0 : 1;
    }
  } catch (const ccobj::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
