#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ccobj/value.hpp"

namespace ccobj {

/// One operation invocation: target object, operation name, arguments.
struct Invocation {
  std::string object;
  std::string op_name;
  std::vector<Value> args;

  friend bool operator==(const Invocation&, const Invocation&) = default;
};

/// Local representation of an object's state. The shape is spec-defined:
/// a scalar for registers and counters, a sequence for stacks and queues
/// (top/back last), a sorted set for sets.
struct ObjectState {
  std::variant<Value, std::vector<Value>, std::set<Value>> rep;

  ObjectState() : rep(Value(0)) {}
  explicit ObjectState(Value v) : rep(std::move(v)) {}
  explicit ObjectState(std::vector<Value> seq) : rep(std::move(seq)) {}
  explicit ObjectState(std::set<Value> items) : rep(std::move(items)) {}

  const Value& scalar() const { return std::get<Value>(rep); }
  const std::vector<Value>& seq() const { return std::get<std::vector<Value>>(rep); }
  const std::set<Value>& items() const { return std::get<std::set<Value>>(rep); }

  /// Canonical byte encoding; equal states encode equally, which is what
  /// the determinism and purity checks compare.
  std::string encode() const;

  friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

struct StepResult {
  Value ret;
  ObjectState next;
};

/// An object type given by an initial state and a deterministic, total
/// transition function. Every reachable state accepts every well-formed
/// invocation and yields exactly one (return, next state) pair.
class SeqSpec {
 public:
  virtual ~SeqSpec() = default;

  /// Catalog name, e.g. "stack" or "bstack(2)".
  virtual std::string name() const = 0;

  virtual ObjectState initial_state() const = 0;

  /// The transition function. Throws UnknownOperation for a name outside
  /// the signature set and DomainError for arguments outside the declared
  /// argument domain. Never mutates `state`.
  virtual StepResult apply(const ObjectState& state, const Invocation& inv) const = 0;

  /// Membership test for the declared return domain of `op_name`.
  virtual bool ret_in_domain(const std::string& op_name, const Value& ret) const = 0;
};

using SpecPtr = std::shared_ptr<const SeqSpec>;

/// Catalog lookup by the exact names used in trace files:
/// `register`, `stack`, `bstack(k)`, `queue`, `counter`, `set`.
/// Throws ParseError for anything else.
SpecPtr make_spec(const std::string& catalog_name);

/// Read/write register with a configurable initial value (the value
/// "written" by the implicit initial write). The catalog entry uses 0.
SpecPtr make_register(Value initial);

/// Folds apply over `invs` starting from the initial state and returns
/// the produced return values.
std::vector<Value> replay(const SeqSpec& spec, const std::vector<Invocation>& invs);

/// A recorded (invocation, return) pair, detached from any process.
struct InvRet {
  Invocation inv;
  Value ret;
};

/// True iff replaying the invocations yields exactly the recorded returns.
/// All records must target objects of this spec.
bool is_legal(const SeqSpec& spec, const std::vector<InvRet>& seq);

}  // namespace ccobj
