#include "ccobj/sim.hpp"

#include <algorithm>
#include <memory>
#include <queue>
#include <set>
#include <tuple>

#include "ccobj/broadcast.hpp"
#include "ccobj/errors.hpp"
#include "ccobj/rng.hpp"
#include "ccobj/runtime.hpp"

namespace ccobj {

bool PartitionWindow::separates(int i, int j, int64_t t) const {
  if (t < from || t >= to) return false;
  int gi = -1, gj = -1;
  for (size_t g = 0; g < groups.size(); ++g)
    for (int p : groups[g]) {
      if (p == i) gi = static_cast<int>(g);
      if (p == j) gj = static_cast<int>(g);
    }
  return gi != gj;
}

nlohmann::json Scenario::to_json() const {
  nlohmann::json j{{"version", version}, {"name", name},     {"n", n},
                   {"mode", mode},       {"seed", seed},     {"objects", objects}};
  if (random) {
    j["script"] = {{"random",
                    {{"ops_per_proc", random->ops_per_proc},
                     {"start", random->start},
                     {"spacing", {random->spacing_min, random->spacing_max}},
                     {"concurrent_write_free", random->concurrent_write_free}}}};
  } else {
    nlohmann::json ops = nlohmann::json::array();
    for (const ScriptOp& op : script) {
      nlohmann::json args = nlohmann::json::array();
      for (const Value& v : op.args) args.push_back(v.to_json());
      ops.push_back({{"pid", op.pid},
                     {"t", op.t},
                     {"object", op.object},
                     {"op", op.op_name},
                     {"args", std::move(args)}});
    }
    j["script"] = std::move(ops);
  }
  nlohmann::json netj{{"delay", {net.delay_min, net.delay_max}}};
  if (!net.partitions.empty()) {
    nlohmann::json parts = nlohmann::json::array();
    for (const PartitionWindow& w : net.partitions)
      parts.push_back({{"from", w.from}, {"to", w.to}, {"groups", w.groups}});
    netj["partitions"] = std::move(parts);
  }
  if (!net.crashes.empty()) {
    nlohmann::json cr = nlohmann::json::array();
    for (const CrashEvent& c : net.crashes) cr.push_back({{"pid", c.pid}, {"t", c.t}});
    netj["crashes"] = std::move(cr);
  }
  j["net"] = std::move(netj);
  return j;
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  Scenario s;
  try {
    s.version = j.value("version", 1);
    s.name = j.value("name", std::string{});
    s.n = j.at("n").get<int>();
    s.mode = j.at("mode").get<std::string>();
    s.seed = j.value("seed", uint64_t{0});
    for (const auto& [obj, cat] : j.at("objects").items())
      s.objects[obj] = cat.get<std::string>();
    if (j.contains("script")) {
      const auto& sj = j.at("script");
      if (sj.is_object()) {
        const auto& r = sj.at("random");
        RandomScript rs;
        rs.ops_per_proc = r.value("ops_per_proc", 4);
        rs.start = r.value("start", int64_t{1});
        if (r.contains("spacing")) {
          rs.spacing_min = r.at("spacing").at(0).get<int64_t>();
          rs.spacing_max = r.at("spacing").at(1).get<int64_t>();
        }
        rs.concurrent_write_free = r.value("concurrent_write_free", false);
        s.random = rs;
      } else {
        for (const auto& o : sj) {
          ScriptOp op;
          op.pid = o.at("pid").get<int>();
          op.t = o.at("t").get<int64_t>();
          op.object = o.at("object").get<std::string>();
          op.op_name = o.at("op").get<std::string>();
          if (o.contains("args"))
            for (const auto& a : o.at("args")) op.args.push_back(Value::from_json(a));
          s.script.push_back(std::move(op));
        }
      }
    }
    if (j.contains("net")) {
      const auto& nj = j.at("net");
      if (nj.contains("delay")) {
        s.net.delay_min = nj.at("delay").at(0).get<int64_t>();
        s.net.delay_max = nj.at("delay").at(1).get<int64_t>();
      }
      for (const auto& p : nj.value("partitions", nlohmann::json::array())) {
        PartitionWindow w;
        w.from = p.at("from").get<int64_t>();
        w.to = p.at("to").get<int64_t>();
        w.groups = p.at("groups").get<std::vector<std::vector<int>>>();
        s.net.partitions.push_back(std::move(w));
      }
      for (const auto& c : nj.value("crashes", nlohmann::json::array()))
        s.net.crashes.push_back({c.at("pid").get<int>(), c.at("t").get<int64_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed scenario: ") + e.what());
  }
  s.validate();
  return s;
}

void Scenario::validate() const {
  if (version != 1) throw ParseError("unsupported scenario version " + std::to_string(version));
  if (n < 1) throw ParseError("scenario needs at least one process");
  if (mode != "causal" && mode != "total")
    throw ParseError("mode must be causal or total, got " + mode);
  if (objects.empty()) throw ParseError("scenario declares no objects");
  for (const auto& [obj, cat] : objects) {
    try {
      make_spec(cat);
    } catch (const Error& e) {
      throw ParseError("object " + obj + ": " + e.what());
    }
  }
  if (random && !script.empty())
    throw ParseError("a scenario carries either an explicit script or a recipe, not both");
  for (const ScriptOp& op : script) {
    if (op.pid < 1 || op.pid > n)
      throw ParseError("script pid " + std::to_string(op.pid) + " outside 1.." +
                       std::to_string(n));
    if (op.t < 0) throw ParseError("script times must be non-negative");
    if (!objects.count(op.object)) throw ParseError("script touches undeclared object " + op.object);
  }
  if (random) {
    if (random->ops_per_proc < 0 || random->start < 0 || random->spacing_min < 1 ||
        random->spacing_min > random->spacing_max)
      throw ParseError("recipe needs ops_per_proc >= 0, start >= 0, 1 <= spacing_min <= spacing_max");
  }
  if (net.delay_min < 1 || net.delay_min > net.delay_max)
    throw ParseError("delays need 1 <= min <= max");
  for (const PartitionWindow& w : net.partitions) {
    if (w.from >= w.to) throw ParseError("partition window must satisfy from < to");
    std::set<int> covered;
    for (const auto& g : w.groups)
      for (int p : g) {
        if (p < 1 || p > n) throw ParseError("partition group pid outside 1.." + std::to_string(n));
        if (!covered.insert(p).second)
          throw ParseError("pid " + std::to_string(p) + " appears in two partition groups");
      }
    if (covered.size() != static_cast<size_t>(n))
      throw ParseError("partition groups must cover every process");
  }
  for (const CrashEvent& c : net.crashes) {
    if (c.pid < 1 || c.pid > n)
      throw ParseError("crash pid " + std::to_string(c.pid) + " outside 1.." + std::to_string(n));
    if (c.t < 0) throw ParseError("crash times must be non-negative");
  }
}

std::string Scenario::digest() const { return hex64(fnv1a(to_json().dump())); }

void expand_script(Scenario& s) {
  s.validate();
  if (!s.random) return;
  const RandomScript r = *s.random;
  std::vector<std::string> objs;
  for (const auto& [obj, cat] : s.objects) objs.push_back(obj);
  std::map<std::string, int64_t> counter;  // unique payloads per object
  for (int pid = 1; pid <= s.n; ++pid) {
    Rng rng(seed_split(s.seed, 1000 + static_cast<uint64_t>(pid)));
    int64_t t = r.start;
    for (int k = 0; k < r.ops_per_proc; ++k) {
      const std::string& obj = objs[rng.pick(objs.size())];
      const std::string& cat = s.objects.at(obj);
      ScriptOp op;
      op.pid = pid;
      op.t = t;
      op.object = obj;
      if (cat == "register") {
        bool write = r.concurrent_write_free ? pid == 1 : (rng.next() & 1);
        if (write) {
          op.op_name = "write";
          op.args = {Value(++counter[obj])};
        } else {
          op.op_name = "read";
        }
      } else if (cat == "stack" || cat.rfind("bstack(", 0) == 0) {
        if (rng.next() & 1) {
          op.op_name = "push";
          op.args = {Value(++counter[obj])};
        } else {
          op.op_name = "pop";
        }
      } else if (cat == "queue") {
        if (rng.next() & 1) {
          op.op_name = "enq";
          op.args = {Value(++counter[obj])};
        } else {
          op.op_name = "deq";
        }
      } else if (cat == "counter") {
        op.op_name = (rng.next() & 1) ? "inc" : "read";
      } else {
        uint64_t roll = rng.next() % 3;
        op.op_name = roll == 0 ? "add" : roll == 1 ? "remove" : "has";
        op.args = {Value(static_cast<int64_t>(rng.next() % 3))};
      }
      s.script.push_back(std::move(op));
      t += rng.range(static_cast<uint64_t>(r.spacing_min), static_cast<uint64_t>(r.spacing_max));
    }
  }
  s.random.reset();
}

namespace {

struct SimEvent {
  int64_t t = 0;
  int rank = 0;  // arrivals fire before invocations at the same tick
  int pid = 0;   // arrival: sender; invoke: invoking process
  uint64_t seq = 0;
  uint64_t serial = 0;
  int kind = 0;  // 0 invoke, 1 causal arrival, 2 total-order arrival
  int to = 0;
  BMessage bmsg;
  TOMessage tmsg;
};

struct EvAfter {
  bool operator()(const SimEvent& a, const SimEvent& b) const {
    return std::tie(a.t, a.rank, a.pid, a.seq, a.serial) >
           std::tie(b.t, b.rank, b.pid, b.seq, b.serial);
  }
};

struct Engine {
  Scenario sc;
  bool causal;
  SimStats stats;
  std::vector<TraceEvent> events;
  std::priority_queue<SimEvent, std::vector<SimEvent>, EvAfter> pq;
  uint64_t serial = 0;
  int64_t now = 0;

  std::vector<std::unique_ptr<Replica>> replicas;
  std::vector<std::unique_ptr<CausalBroadcastNode>> cnodes;
  std::vector<std::unique_ptr<TotalOrderNode>> tnodes;
  std::map<std::pair<int, int>, Rng> channels;
  std::map<int, int64_t> crash_at;

  std::vector<std::vector<ScriptOp>> perproc;
  std::vector<size_t> cursor;
  std::vector<int64_t> free_at;

  struct Open {
    int64_t invoke_t = 0;
    ScriptOp op;
    int op_index = 0;
  };
  std::vector<std::optional<Open>> open;

  explicit Engine(const Scenario& in) : sc(in) {
    expand_script(sc);
    causal = sc.mode == "causal";
    perproc.resize(sc.n);
    for (const ScriptOp& op : sc.script) perproc[op.pid - 1].push_back(op);
    for (auto& l : perproc)
      std::stable_sort(l.begin(), l.end(),
                       [](const ScriptOp& a, const ScriptOp& b) { return a.t < b.t; });
    cursor.assign(sc.n, 0);
    free_at.assign(sc.n, 0);
    open.resize(sc.n);
    for (const CrashEvent& c : sc.net.crashes) {
      auto [it, fresh] = crash_at.emplace(c.pid, c.t);
      if (!fresh) it->second = std::min(it->second, c.t);
    }
    std::map<std::string, SpecPtr> specs;
    for (const auto& [obj, cat] : sc.objects) specs[obj] = make_spec(cat);
    for (int pid = 1; pid <= sc.n; ++pid) {
      replicas.push_back(std::make_unique<Replica>(pid, specs));
      if (causal)
        cnodes.push_back(std::make_unique<CausalBroadcastNode>(
            sc.n, pid, [this, pid](const BMessage& m) { on_causal_deliver(pid, m); }));
      else
        tnodes.push_back(std::make_unique<TotalOrderNode>(
            sc.n, pid, [this, pid](uint64_t g, const OperationPayload& p) {
              on_total_deliver(pid, g, p);
            }));
    }
  }

  bool crashed(int pid, int64_t t) const {
    auto it = crash_at.find(pid);
    return it != crash_at.end() && it->second <= t;
  }

  Rng& channel(int from, int to) {
    auto key = std::make_pair(from, to);
    auto it = channels.find(key);
    if (it == channels.end())
      it = channels
               .emplace(key, Rng(seed_split(sc.seed, static_cast<uint64_t>(from) * 101 +
                                                         static_cast<uint64_t>(to))))
               .first;
    return it->second;
  }

  int64_t deliver_at(int from, int to) {
    int64_t a =
        now + static_cast<int64_t>(channel(from, to).range(
                  static_cast<uint64_t>(sc.net.delay_min), static_cast<uint64_t>(sc.net.delay_max)));
    bool moved = true, held = false;
    while (moved) {
      moved = false;
      for (const PartitionWindow& w : sc.net.partitions)
        if (w.separates(from, to, a)) {
          a = w.to;
          moved = true;
          held = true;
        }
    }
    if (held) ++stats.held;
    return a;
  }

  void schedule_next_invoke(int pid) {
    if (cursor[pid - 1] >= perproc[pid - 1].size()) return;
    const ScriptOp& op = perproc[pid - 1][cursor[pid - 1]];
    SimEvent ev;
    ev.t = std::max(op.t, free_at[pid - 1]);
    ev.rank = 1;
    ev.pid = pid;
    ev.seq = cursor[pid - 1];
    ev.serial = ++serial;
    ev.kind = 0;
    pq.push(std::move(ev));
  }

  void send_causal(int from, int to, const BMessage& m) {
    ++stats.messages_sent;
    SimEvent ev;
    ev.t = deliver_at(from, to);
    ev.rank = 0;
    ev.pid = from;
    ev.seq = m.seq;
    ev.serial = ++serial;
    ev.kind = 1;
    ev.to = to;
    ev.bmsg = m;
    pq.push(std::move(ev));
  }

  void send_total(int from, int to, const TOMessage& m) {
    ++stats.messages_sent;
    SimEvent ev;
    ev.t = deliver_at(from, to);
    ev.rank = 0;
    ev.pid = from;
    ev.seq = m.seq;
    ev.serial = ++serial;
    ev.kind = 2;
    ev.to = to;
    ev.tmsg = m;
    pq.push(std::move(ev));
  }

  void on_causal_deliver(int pid, const BMessage& m) {
    ++stats.deliveries;
    replicas[pid - 1]->on_deliver(m.payload);
    if (m.payload.pid != pid) {
      TraceEvent ev;
      ev.deliver = TraceDeliver{pid, make_op_id(m.payload.pid, m.payload.op_index), now};
      events.push_back(std::move(ev));
    }
  }

  void on_total_deliver(int pid, uint64_t gseq, const OperationPayload& payload) {
    ++stats.deliveries;
    replicas[pid - 1]->on_deliver(payload);
    if (payload.pid != pid) {
      TraceEvent ev;
      ev.deliver = TraceDeliver{pid, make_op_id(payload.pid, payload.op_index), now};
      events.push_back(std::move(ev));
      return;
    }
    Open o = *open[pid - 1];
    open[pid - 1].reset();
    int64_t response_t = now == o.invoke_t ? now + 1 : now;
    TraceOp top;
    top.op_id = make_op_id(pid, o.op_index);
    top.pid = pid;
    top.object = o.op.object;
    top.name = o.op.op_name;
    top.args = o.op.args;
    top.ret = *replicas[pid - 1]->take_result();
    top.rt = RtInterval{o.invoke_t, response_t};
    top.gseq = gseq;
    TraceEvent ev;
    ev.op = std::move(top);
    events.push_back(std::move(ev));
    free_at[pid - 1] = response_t + 1;
    schedule_next_invoke(pid);
  }

  void handle_invoke(int pid) {
    if (crashed(pid, now)) {
      replicas[pid - 1]->crash();
      stats.skipped_invokes += perproc[pid - 1].size() - cursor[pid - 1];
      cursor[pid - 1] = perproc[pid - 1].size();
      return;
    }
    const ScriptOp op = perproc[pid - 1][cursor[pid - 1]];
    const int op_index = static_cast<int>(cursor[pid - 1]);
    ++cursor[pid - 1];

    OperationPayload payload;
    payload.pid = pid;
    payload.op_index = op_index;
    payload.object = op.object;
    payload.op_name = op.op_name;
    payload.args = op.args;

    if (causal) {
      BMessage m = cnodes[pid - 1]->broadcast(payload);
      TraceOp top;
      top.op_id = make_op_id(pid, op_index);
      top.pid = pid;
      top.object = op.object;
      top.name = op.op_name;
      top.args = op.args;
      top.ret = *replicas[pid - 1]->take_result();
      top.rt = RtInterval{now, now + 1};
      top.vclock = m.vclock;
      TraceEvent ev;
      ev.op = std::move(top);
      events.push_back(std::move(ev));
      for (int to = 1; to <= sc.n; ++to)
        if (to != pid) send_causal(pid, to, m);
      free_at[pid - 1] = now + 2;
      schedule_next_invoke(pid);
    } else {
      open[pid - 1] = Open{now, op, op_index};
      std::vector<TOMessage> out = tnodes[pid - 1]->submit(payload);
      for (const TOMessage& m : out) {
        if (m.kind == TOMessage::Kind::Request) {
          send_total(pid, 1, m);
        } else {
          for (int to = 2; to <= sc.n; ++to) send_total(1, to, m);
        }
      }
    }
  }

  void handle_arrival(const SimEvent& ev) {
    if (crashed(ev.to, now)) {
      ++stats.dropped;
      return;
    }
    if (ev.kind == 1) {
      cnodes[ev.to - 1]->receive(ev.bmsg);
    } else {
      std::vector<TOMessage> out = tnodes[ev.to - 1]->receive(ev.tmsg);
      for (const TOMessage& m : out)
        for (int to = 2; to <= sc.n; ++to) send_total(1, to, m);
    }
  }

  SimResult run() {
    for (int pid = 1; pid <= sc.n; ++pid) schedule_next_invoke(pid);
    while (!pq.empty()) {
      SimEvent ev = pq.top();
      pq.pop();
      now = ev.t;
      if (ev.kind == 0)
        handle_invoke(ev.pid);
      else
        handle_arrival(ev);
    }
    for (int pid = 1; pid <= sc.n; ++pid) {
      if (open[pid - 1]) ++stats.incomplete;
      stats.skipped_invokes += perproc[pid - 1].size() - cursor[pid - 1];
    }

    SimResult res;
    res.trace.version = 1;
    res.trace.scenario = sc.name;
    res.trace.scenario_digest = sc.digest();
    res.trace.processes = sc.n;
    res.trace.objects = sc.objects;
    res.trace.events = std::move(events);
    res.stats = stats;
    for (int pid = 1; pid <= sc.n; ++pid) {
      ReplicaSummary r;
      r.pid = pid;
      r.crashed = crashed(pid, now);
      if (causal) r.delivered = cnodes[pid - 1]->delivered();
      if (!causal) r.delivered_through = tnodes[pid - 1]->delivered_through();
      r.final_states = replicas[pid - 1]->states();
      r.log_size = replicas[pid - 1]->op_log().size();
      res.replicas.push_back(std::move(r));
    }
    return res;
  }
};

}  // namespace

SimResult run_scenario(const Scenario& scenario) { return Engine(scenario).run(); }

}  // namespace ccobj
