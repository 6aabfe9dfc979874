#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccobj/trace.hpp"

namespace ccobj {

/// Active on [from, to): messages between the groups are held and arrive
/// when the partition heals.
struct PartitionWindow {
  int64_t from = 0;
  int64_t to = 0;
  std::vector<std::vector<int>> groups;

  bool separates(int i, int j, int64_t t) const;
};

struct CrashEvent {
  int pid = 0;
  int64_t t = 0;  // silent stop: no invokes, sends, or receives from t on
};

struct NetConfig {
  int64_t delay_min = 1;
  int64_t delay_max = 1;
  std::vector<PartitionWindow> partitions;
  std::vector<CrashEvent> crashes;
};

struct ScriptOp {
  int pid = 0;
  int64_t t = 0;  // earliest invocation tick; pushed back while the previous op is open
  std::string object;
  std::string op_name;
  std::vector<Value> args;
};

/// Recipe expanded into a concrete script by expand_script.
struct RandomScript {
  int ops_per_proc = 4;
  int64_t start = 1;
  int64_t spacing_min = 2;
  int64_t spacing_max = 6;
  bool concurrent_write_free = false;  // registers: process 1 writes, the others read
};

struct Scenario {
  int version = 1;
  std::string name;
  int n = 0;
  std::string mode;  // "causal" or "total"
  uint64_t seed = 0;
  std::map<std::string, std::string> objects;  // object id -> catalog name
  std::vector<ScriptOp> script;
  std::optional<RandomScript> random;
  NetConfig net;

  nlohmann::json to_json() const;
  static Scenario from_json(const nlohmann::json& j);
  void validate() const;  // throws ParseError

  /// FNV-1a of the canonical JSON dump; stamped into traces so a trace can
  /// be matched to the exact scenario that produced it.
  std::string digest() const;
};

/// Draws an explicit timed script from the seed and clears `random`.
/// Separate randomness channels per process keep the draw stable when other
/// parts of the scenario change.
void expand_script(Scenario& s);

struct SimStats {
  size_t messages_sent = 0;
  size_t deliveries = 0;       // applied operations across all replicas, self included
  size_t held = 0;             // arrivals pushed back to a partition heal
  size_t dropped = 0;          // arrivals at crashed replicas
  size_t skipped_invokes = 0;  // scripted operations never invoked
  size_t incomplete = 0;       // invocations still open when the run ended
};

struct ReplicaSummary {
  int pid = 0;
  bool crashed = false;
  std::vector<uint64_t> delivered;  // causal mode: per-sender delivered counts
  uint64_t delivered_through = 0;   // total mode: highest stamp applied
  std::map<std::string, ObjectState> final_states;
  size_t log_size = 0;
};

struct SimResult {
  TraceFile trace;
  SimStats stats;
  std::vector<ReplicaSummary> replicas;
};

/// Deterministic discrete-event run of the scenario: integer ticks, seeded
/// per-link delays, ties broken by (time, arrivals before invokes, pid,
/// sequence number). The same scenario always produces byte-identical
/// traces.
SimResult run_scenario(const Scenario& scenario);

}  // namespace ccobj
