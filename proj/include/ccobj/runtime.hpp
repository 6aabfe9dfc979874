#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccobj/broadcast.hpp"
#include "ccobj/objects.hpp"

namespace ccobj {

/// One replica of the universal construction: a full local copy of every
/// object, advanced by applying delivered operations in delivery order. Own
/// operations park their computed value in a result slot that the caller
/// collects to complete the invocation.
class Replica {
 public:
  struct LogEntry {
    OperationPayload op;
    Value ret;
  };

  Replica(int pid, std::map<std::string, SpecPtr> specs);

  /// Applies one delivered operation, logs it, and returns the computed
  /// value. Throws UnknownObject for an undeclared object and
  /// CrashedReplica after crash().
  Value on_deliver(const OperationPayload& op);

  void crash() { crashed_ = true; }
  bool crashed() const { return crashed_; }

  int pid() const { return pid_; }
  const ObjectState& state_of(const std::string& object) const;
  const std::map<std::string, ObjectState>& states() const { return states_; }
  const std::vector<LogEntry>& op_log() const { return log_; }

  /// The value produced by the most recent delivery of an own operation,
  /// cleared by the call.
  std::optional<Value> take_result();

 private:
  int pid_;
  bool crashed_ = false;
  std::map<std::string, SpecPtr> specs_;
  std::map<std::string, ObjectState> states_;
  std::vector<LogEntry> log_;
  std::optional<Value> result_slot_;
};

}  // namespace ccobj
