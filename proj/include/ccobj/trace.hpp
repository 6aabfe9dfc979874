#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccobj/history.hpp"

namespace ccobj {

uint64_t fnv1a(const std::string& bytes);
std::string hex64(uint64_t v);

struct TraceOp {
  std::string op_id;
  int pid = 0;
  std::string object;
  std::string name;
  std::vector<Value> args;
  Value ret;
  std::optional<RtInterval> rt;                 // absent in hand-written traces
  std::optional<std::vector<uint64_t>> vclock;  // causal runs
  std::optional<uint64_t> gseq;                 // total-order runs
};

struct TraceDeliver {
  int pid = 0;
  std::string of_op;
  int64_t t = 0;
};

/// Exactly one of the two is set.
struct TraceEvent {
  std::optional<TraceOp> op;
  std::optional<TraceDeliver> deliver;
};

/// On-disk record of a run (or a hand-written history): completed operations
/// in completion order interleaved with foreign deliveries. Round-trips
/// through JSON without loss.
struct TraceFile {
  int version = 1;
  std::string scenario;
  std::string scenario_digest;
  int processes = 0;
  std::map<std::string, std::string> objects;  // object id -> catalog name
  std::vector<TraceEvent> events;

  nlohmann::json to_json() const;
  static TraceFile from_json(const nlohmann::json& j);

  /// The history of the completed operations, rt intervals included when
  /// the trace carries them.
  History to_history() const;

  /// Cross-process pairs ordered by strict vector-clock dominance. Throws
  /// MissingTimestamps when any operation lacks a vector clock.
  EdgeSet vclock_edges() const;

  /// Consecutive cross-process pairs in global stamp order. Throws
  /// MissingTimestamps when any operation lacks a stamp.
  EdgeSet gseq_edges() const;
};

}  // namespace ccobj
