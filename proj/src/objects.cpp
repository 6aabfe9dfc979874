#include "ccobj/objects.hpp"

#include <algorithm>
#include <charconv>

namespace ccobj {

std::string ObjectState::encode() const {
  std::string out;
  if (std::holds_alternative<Value>(rep)) {
    out = "v(" + scalar().encode() + ")";
  } else if (std::holds_alternative<std::vector<Value>>(rep)) {
    out = "q(";
    for (const auto& v : seq()) out += v.encode() + ",";
    out += ")";
  } else {
    out = "m(";
    for (const auto& v : items()) out += v.encode() + ",";
    out += ")";
  }
  return out;
}

namespace {

void expect_arity(const Invocation& inv, size_t arity) {
  if (inv.args.size() != arity) {
    throw DomainError(inv.op_name + " takes " + std::to_string(arity) +
                      " argument(s), got " + std::to_string(inv.args.size()));
  }
}

// Payload arguments anywhere in the catalog are plain integers or strings;
// the distinguished symbols are return-side only.
void expect_payload(const Invocation& inv) {
  expect_arity(inv, 1);
  if (inv.args[0].is_sym()) {
    throw DomainError(inv.op_name + ": reserved symbol used as an argument");
  }
}

class RegisterSpec final : public SeqSpec {
 public:
  explicit RegisterSpec(Value initial) : initial_(std::move(initial)) {}

  std::string name() const override { return "register"; }
  ObjectState initial_state() const override { return ObjectState(initial_); }

  StepResult apply(const ObjectState& state, const Invocation& inv) const override {
    if (inv.op_name == "read") {
      expect_arity(inv, 0);
      return {state.scalar(), state};
    }
    if (inv.op_name == "write") {
      expect_payload(inv);
      return {Value::done(), ObjectState(inv.args[0])};
    }
    throw UnknownOperation("register has no operation " + inv.op_name);
  }

  bool ret_in_domain(const std::string& op_name, const Value& ret) const override {
    if (op_name == "read") return !ret.is_sym() || ret == initial_;
    if (op_name == "write") return ret.is_sym(Symbol::Done);
    return false;
  }

 private:
  Value initial_;
};

class StackSpec final : public SeqSpec {
 public:
  // capacity < 0 means unbounded
  explicit StackSpec(int64_t capacity = -1) : capacity_(capacity) {}

  std::string name() const override {
    return capacity_ < 0 ? "stack" : "bstack(" + std::to_string(capacity_) + ")";
  }
  ObjectState initial_state() const override { return ObjectState(std::vector<Value>{}); }

  StepResult apply(const ObjectState& state, const Invocation& inv) const override {
    const auto& items = state.seq();
    if (inv.op_name == "push") {
      expect_payload(inv);
      if (capacity_ >= 0 && static_cast<int64_t>(items.size()) >= capacity_) {
        // full: the push is rejected, the state is unchanged
        return {Value::top(), state};
      }
      auto next = items;
      next.push_back(inv.args[0]);
      return {Value::done(), ObjectState(std::move(next))};
    }
    if (inv.op_name == "pop") {
      expect_arity(inv, 0);
      if (items.empty()) return {Value::bottom(), state};
      auto next = items;
      Value top = next.back();
      next.pop_back();
      return {std::move(top), ObjectState(std::move(next))};
    }
    throw UnknownOperation(name() + " has no operation " + inv.op_name);
  }

  bool ret_in_domain(const std::string& op_name, const Value& ret) const override {
    if (op_name == "push") {
      return ret.is_sym(Symbol::Done) || (capacity_ >= 0 && ret.is_sym(Symbol::Top));
    }
    if (op_name == "pop") return ret.is_sym(Symbol::Bottom) || !ret.is_sym();
    return false;
  }

 private:
  int64_t capacity_;
};

class QueueSpec final : public SeqSpec {
 public:
  std::string name() const override { return "queue"; }
  ObjectState initial_state() const override { return ObjectState(std::vector<Value>{}); }

  StepResult apply(const ObjectState& state, const Invocation& inv) const override {
    const auto& items = state.seq();
    if (inv.op_name == "enq") {
      expect_payload(inv);
      auto next = items;
      next.push_back(inv.args[0]);
      return {Value::done(), ObjectState(std::move(next))};
    }
    if (inv.op_name == "deq") {
      expect_arity(inv, 0);
      if (items.empty()) return {Value::bottom(), state};
      Value front = items.front();
      return {std::move(front),
              ObjectState(std::vector<Value>(items.begin() + 1, items.end()))};
    }
    throw UnknownOperation("queue has no operation " + inv.op_name);
  }

  bool ret_in_domain(const std::string& op_name, const Value& ret) const override {
    if (op_name == "enq") return ret.is_sym(Symbol::Done);
    if (op_name == "deq") return ret.is_sym(Symbol::Bottom) || !ret.is_sym();
    return false;
  }
};

class CounterSpec final : public SeqSpec {
 public:
  std::string name() const override { return "counter"; }
  ObjectState initial_state() const override { return ObjectState(Value(0)); }

  StepResult apply(const ObjectState& state, const Invocation& inv) const override {
    if (inv.op_name == "inc") {
      expect_arity(inv, 0);
      return {Value::done(), ObjectState(Value(state.scalar().as_int() + 1))};
    }
    if (inv.op_name == "read") {
      expect_arity(inv, 0);
      return {state.scalar(), state};
    }
    throw UnknownOperation("counter has no operation " + inv.op_name);
  }

  bool ret_in_domain(const std::string& op_name, const Value& ret) const override {
    if (op_name == "inc") return ret.is_sym(Symbol::Done);
    if (op_name == "read") return ret.is_int();
    return false;
  }
};

class SetSpec final : public SeqSpec {
 public:
  std::string name() const override { return "set"; }
  ObjectState initial_state() const override { return ObjectState(std::set<Value>{}); }

  StepResult apply(const ObjectState& state, const Invocation& inv) const override {
    if (inv.op_name == "add") {
      expect_payload(inv);
      auto next = state.items();
      next.insert(inv.args[0]);
      return {Value::done(), ObjectState(std::move(next))};
    }
    if (inv.op_name == "remove") {
      expect_payload(inv);
      auto next = state.items();
      // absent element: report bottom, state unchanged
      if (next.erase(inv.args[0]) == 0) return {Value::bottom(), state};
      return {Value::done(), ObjectState(std::move(next))};
    }
    if (inv.op_name == "has") {
      expect_payload(inv);
      return {Value(state.items().count(inv.args[0]) ? 1 : 0), state};
    }
    throw UnknownOperation("set has no operation " + inv.op_name);
  }

  bool ret_in_domain(const std::string& op_name, const Value& ret) const override {
    if (op_name == "add") return ret.is_sym(Symbol::Done);
    if (op_name == "remove") return ret.is_sym(Symbol::Done) || ret.is_sym(Symbol::Bottom);
    if (op_name == "has") return ret.is_int() && (ret.as_int() == 0 || ret.as_int() == 1);
    return false;
  }
};

}  // namespace

SpecPtr make_register(Value initial) {
  return std::make_shared<RegisterSpec>(std::move(initial));
}

SpecPtr make_spec(const std::string& catalog_name) {
  if (catalog_name == "register") return std::make_shared<RegisterSpec>(Value(0));
  if (catalog_name == "stack") return std::make_shared<StackSpec>();
  if (catalog_name == "queue") return std::make_shared<QueueSpec>();
  if (catalog_name == "counter") return std::make_shared<CounterSpec>();
  if (catalog_name == "set") return std::make_shared<SetSpec>();
  if (catalog_name.starts_with("bstack(") && catalog_name.ends_with(")")) {
    const std::string num = catalog_name.substr(7, catalog_name.size() - 8);
    int64_t k = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), k);
    if (ec == std::errc() && ptr == num.data() + num.size() && k >= 0) {
      return std::make_shared<StackSpec>(k);
    }
  }
  throw ParseError("unknown object spec: " + catalog_name);
}

std::vector<Value> replay(const SeqSpec& spec, const std::vector<Invocation>& invs) {
  std::vector<Value> rets;
  rets.reserve(invs.size());
  ObjectState state = spec.initial_state();
  for (const auto& inv : invs) {
    StepResult step = spec.apply(state, inv);
    rets.push_back(std::move(step.ret));
    state = std::move(step.next);
  }
  return rets;
}

bool is_legal(const SeqSpec& spec, const std::vector<InvRet>& seq) {
  ObjectState state = spec.initial_state();
  for (const auto& rec : seq) {
    StepResult step = spec.apply(state, rec.inv);
    if (step.ret != rec.ret) return false;
    state = std::move(step.next);
  }
  return true;
}

}  // namespace ccobj
