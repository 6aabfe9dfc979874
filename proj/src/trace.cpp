#include "ccobj/trace.hpp"

#include <algorithm>
#include <cstdio>

#include "ccobj/errors.hpp"

namespace ccobj {

uint64_t fnv1a(const std::string& bytes) {
  uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string hex64(uint64_t v) {
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

nlohmann::json TraceFile::to_json() const {
  nlohmann::json evs = nlohmann::json::array();
  for (const TraceEvent& e : events) {
    if (e.op) {
      nlohmann::json op{{"op_id", e.op->op_id}, {"pid", e.op->pid},
                        {"object", e.op->object}, {"name", e.op->name}};
      nlohmann::json args = nlohmann::json::array();
      for (const Value& v : e.op->args) args.push_back(v.to_json());
      op["args"] = std::move(args);
      op["ret"] = e.op->ret.to_json();
      if (e.op->rt) {
        op["invoke_t"] = e.op->rt->invoke_t;
        op["response_t"] = e.op->rt->response_t;
      }
      if (e.op->vclock) op["vclock"] = *e.op->vclock;
      if (e.op->gseq) op["gseq"] = *e.op->gseq;
      evs.push_back(nlohmann::json{{"op", std::move(op)}});
    } else {
      evs.push_back(nlohmann::json{
          {"deliver",
           {{"pid", e.deliver->pid}, {"of_op", e.deliver->of_op}, {"t", e.deliver->t}}}});
    }
  }
  nlohmann::json j{{"version", version}, {"scenario", scenario}, {"processes", processes},
                   {"objects", objects}, {"events", std::move(evs)}};
  if (!scenario_digest.empty()) j["scenario_digest"] = scenario_digest;
  return j;
}

TraceFile TraceFile::from_json(const nlohmann::json& j) {
  TraceFile t;
  try {
    t.version = j.at("version").get<int>();
    if (t.version != 1)
      throw ParseError("unsupported trace version " + std::to_string(t.version));
    t.scenario = j.value("scenario", std::string{});
    t.scenario_digest = j.value("scenario_digest", std::string{});
    t.processes = j.at("processes").get<int>();
    for (const auto& [obj, cat] : j.at("objects").items())
      t.objects[obj] = cat.get<std::string>();
    for (const auto& e : j.at("events")) {
      TraceEvent ev;
      if (e.contains("op")) {
        const auto& o = e.at("op");
        TraceOp op;
        op.op_id = o.at("op_id").get<std::string>();
        op.pid = o.at("pid").get<int>();
        op.object = o.at("object").get<std::string>();
        op.name = o.at("name").get<std::string>();
        for (const auto& a : o.at("args")) op.args.push_back(Value::from_json(a));
        op.ret = Value::from_json(o.at("ret"));
        if (o.contains("invoke_t") != o.contains("response_t"))
          throw ParseError(op.op_id + ": invoke_t and response_t must come together");
        if (o.contains("invoke_t"))
          op.rt = RtInterval{o.at("invoke_t").get<int64_t>(), o.at("response_t").get<int64_t>()};
        if (o.contains("vclock")) op.vclock = o.at("vclock").get<std::vector<uint64_t>>();
        if (o.contains("gseq")) op.gseq = o.at("gseq").get<uint64_t>();
        ev.op = std::move(op);
      } else if (e.contains("deliver")) {
        const auto& d = e.at("deliver");
        ev.deliver = TraceDeliver{d.at("pid").get<int>(), d.at("of_op").get<std::string>(),
                                  d.value("t", int64_t{0})};
      } else {
        throw ParseError("trace event is neither an op nor a deliver");
      }
      t.events.push_back(std::move(ev));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed trace: ") + e.what());
  }
  return t;
}

History TraceFile::to_history() const {
  History h;
  h.n = processes;
  for (const auto& [obj, cat] : objects) h.specs[obj] = make_spec(cat);
  h.locals.resize(processes);
  for (const TraceEvent& e : events) {
    if (!e.op) continue;
    const TraceOp& op = *e.op;
    if (op.pid < 1 || op.pid > processes)
      throw ParseError(op.op_id + ": pid " + std::to_string(op.pid) + " outside 1.." +
                       std::to_string(processes));
    OpRecord rec;
    rec.op_id = op.op_id;
    rec.pid = op.pid;
    rec.local_index = static_cast<int>(h.locals[op.pid - 1].size());
    rec.inv = Invocation{op.object, op.name, op.args};
    rec.ret = op.ret;
    rec.rt = op.rt;
    h.locals[op.pid - 1].push_back(std::move(rec));
  }
  h.validate();
  return h;
}

EdgeSet TraceFile::vclock_edges() const {
  std::vector<const TraceOp*> ops;
  for (const TraceEvent& e : events)
    if (e.op) {
      if (!e.op->vclock) throw MissingTimestamps(e.op->op_id + " carries no vector clock");
      ops.push_back(&*e.op);
    }
  EdgeSet edges;
  for (const TraceOp* a : ops)
    for (const TraceOp* b : ops) {
      if (a->pid == b->pid) continue;
      if (a->vclock->size() != b->vclock->size())
        throw ParseError("vector clocks of " + a->op_id + " and " + b->op_id +
                         " have different widths");
      bool le = true, lt = false;
      for (size_t k = 0; k < a->vclock->size(); ++k) {
        if ((*a->vclock)[k] > (*b->vclock)[k]) le = false;
        if ((*a->vclock)[k] < (*b->vclock)[k]) lt = true;
      }
      if (le && lt) edges.emplace_back(a->op_id, b->op_id);
    }
  std::sort(edges.begin(), edges.end());
  return edges;
}

EdgeSet TraceFile::gseq_edges() const {
  std::vector<const TraceOp*> ops;
  for (const TraceEvent& e : events)
    if (e.op) {
      if (!e.op->gseq) throw MissingTimestamps(e.op->op_id + " carries no stamp");
      ops.push_back(&*e.op);
    }
  std::sort(ops.begin(), ops.end(),
            [](const TraceOp* a, const TraceOp* b) { return *a->gseq < *b->gseq; });
  EdgeSet edges;
  for (size_t i = 1; i < ops.size(); ++i) {
    if (*ops[i - 1]->gseq == *ops[i]->gseq)
      throw ParseError("stamp " + std::to_string(*ops[i]->gseq) + " used twice");
    if (ops[i - 1]->pid != ops[i]->pid)
      edges.emplace_back(ops[i - 1]->op_id, ops[i]->op_id);
  }
  return edges;
}

}  // namespace ccobj
