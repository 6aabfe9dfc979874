#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccobj/history.hpp"

namespace ccobj {

/// Evidence that a history satisfies a condition. order_edges are the causal
/// edges beyond process order that generate the accepting order.
/// serializations maps pid to the accepting operation sequence seen by that
/// process; key 0 carries the single global order of the total-order
/// conditions.
struct Witness {
  EdgeSet order_edges;
  std::map<int, std::vector<std::string>> serializations;

  nlohmann::json to_json() const;
  static Witness from_json(const nlohmann::json& j);
};

struct Verdict {
  std::string condition;
  bool accepted = false;
  bool unknown = false;  // search budget ran out before a definite answer
  std::optional<Witness> witness;
  std::vector<std::string> diagnostics;

  nlohmann::json to_json() const;
  int exit_code() const { return unknown ? 3 : accepted ? 0 : 1; }
};

struct CheckLimits {
  size_t max_ops = 0;       // 0 picks the per-condition default
  size_t budget = 5000000;  // search steps before giving up with unknown
};

/// Is there any causal order (a strict partial order containing process
/// order) under which every process can serialize all operations so that
/// each of its own operations is preceded by exactly its causal past and
/// returns its recorded value? Foreign return values are free: the replay
/// through the object's transition function assigns them. Complete for
/// small histories; answers unknown when the budget runs out and the
/// sequential fallback also fails to settle it. Throws SizeLimit above
/// max_ops (default 10, overridable via CCOBJ_MAX_OPS).
Verdict check_causal(const History& h, const CheckLimits& lim = {});

/// Same acceptance test, but against one candidate order given by explicit
/// edges (for example the vector-clock order recorded in a trace) instead of
/// searching for one.
Verdict check_causal_certificate(const History& h, const EdgeSet& edges,
                                 const CheckLimits& lim = {});

/// Register-only causal memory: the writes-into edges are forced by unique
/// values, the causality order is the closure of process order with them,
/// and each process must serialize its own operations plus all writes so
/// that every read returns the latest preceding write (or the initial
/// value). Throws AmbiguousWrite when a value is written twice and
/// DomainError when a non-register object appears.
Verdict check_causal_memory(const History& h, const CheckLimits& lim = {});

/// One global order of all operations, extending every process order, legal
/// with all recorded return values. Default max_ops 12.
Verdict check_sequential(const History& h, const CheckLimits& lim = {});

/// check_sequential strengthened by real time: an operation that responded
/// before another was invoked must precede it. Throws MissingTimestamps when
/// any operation lacks an rt interval.
Verdict check_linearizable(const History& h, const CheckLimits& lim = {});

/// Validates a witness against the definition of `condition` from scratch,
/// sharing nothing with the searches above. Reasons for failure land in
/// *why when given.
bool check_witness(const History& h, const std::string& condition, const Witness& w,
                   std::vector<std::string>* why = nullptr);

}  // namespace ccobj
