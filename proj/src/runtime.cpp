#include "ccobj/runtime.hpp"

#include "ccobj/errors.hpp"

namespace ccobj {

Replica::Replica(int pid, std::map<std::string, SpecPtr> specs)
    : pid_(pid), specs_(std::move(specs)) {
  for (const auto& [obj, spec] : specs_) states_.emplace(obj, spec->initial_state());
}

Value Replica::on_deliver(const OperationPayload& op) {
  if (crashed_) throw CrashedReplica("replica " + std::to_string(pid_) + " is down");
  auto it = specs_.find(op.object);
  if (it == specs_.end())
    throw UnknownObject("replica " + std::to_string(pid_) + " holds no object " + op.object);
  Invocation inv{op.object, op.op_name, op.args};
  StepResult r = it->second->apply(states_.at(op.object), inv);
  states_.at(op.object) = r.next;
  log_.push_back({op, r.ret});
  if (op.pid == pid_) result_slot_ = r.ret;
  return r.ret;
}

const ObjectState& Replica::state_of(const std::string& object) const {
  auto it = states_.find(object);
  if (it == states_.end())
    throw UnknownObject("replica " + std::to_string(pid_) + " holds no object " + object);
  return it->second;
}

std::optional<Value> Replica::take_result() {
  std::optional<Value> r = std::move(result_slot_);
  result_slot_.reset();
  return r;
}

}  // namespace ccobj
