#include "ccobj/checker.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <set>

#include "ccobj/errors.hpp"

namespace ccobj {

nlohmann::json Witness::to_json() const {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : order_edges) edges.push_back(nlohmann::json::array({a, b}));
  nlohmann::json sers = nlohmann::json::object();
  for (const auto& [pid, seq] : serializations) sers[std::to_string(pid)] = seq;
  return {{"order_edges", edges}, {"serializations", sers}};
}

Witness Witness::from_json(const nlohmann::json& j) {
  Witness w;
  try {
    for (const auto& e : j.at("order_edges"))
      w.order_edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    for (const auto& [pid, seq] : j.at("serializations").items())
      w.serializations[std::stoi(pid)] = seq.get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed witness: ") + e.what());
  }
  return w;
}

nlohmann::json Verdict::to_json() const {
  nlohmann::json j{{"condition", condition}, {"accepted", accepted}};
  if (unknown) j["unknown"] = true;
  if (witness) j["witness"] = witness->to_json();
  j["diagnostics"] = diagnostics;
  return j;
}

namespace {

using State = std::map<std::string, ObjectState>;

State initial_state(const History& h) {
  State s;
  for (const auto& [obj, spec] : h.specs) s.emplace(obj, spec->initial_state());
  return s;
}

std::string encode_state(const State& s) {
  std::string out;
  for (const auto& [obj, st] : s) {
    out += obj;
    out += '=';
    out += st.encode();
    out += ';';
  }
  return out;
}

std::vector<const OpRecord*> op_index(const History& h, const CausalOrder& po) {
  std::vector<const OpRecord*> rec(po.size(), nullptr);
  for (const auto& l : h.locals)
    for (const OpRecord& op : l) rec[po.node_of(op.op_id)] = &op;
  return rec;
}

struct Budget {
  size_t left;
  bool spent() {
    if (left == 0) return true;
    --left;
    return false;
  }
};

size_t causal_default_max_ops() {
  const char* env = std::getenv("CCOBJ_MAX_OPS");
  if (!env || !*env) return 10;
  char* end = nullptr;
  unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0' || v == 0) throw ParseError("CCOBJ_MAX_OPS must be a positive integer");
  return static_cast<size_t>(v);
}

void enforce_size(const History& h, size_t cap, const char* what) {
  if (h.total_ops() > 64)
    throw SizeLimit("the search engine handles at most 64 operations, history has " +
                    std::to_string(h.total_ops()));
  if (h.total_ops() > cap)
    throw SizeLimit(std::string(what) + " checking covers at most " + std::to_string(cap) +
                    " operations, history has " + std::to_string(h.total_ops()) +
                    " (raise max_ops to override)");
}

/// Searches one process's serializations under a fixed causal order. The
/// segment structure pins where own operations sit; the DFS interleaves each
/// segment's foreign operations, threading object states through, and checks
/// recorded return values at own operations only.
struct SerializationSearch {
  const History& h;
  const CausalOrder& po;
  const std::vector<const OpRecord*>& rec;
  Budget& budget;
  SegmentStructure seg;
  std::set<std::string> dead;
  std::vector<int> path;

  SerializationSearch(const History& h, const CausalOrder& po,
                      const std::vector<const OpRecord*>& rec, int pid, Budget& budget)
      : h(h), po(po), rec(rec), budget(budget), seg(segment_structure(po, h, pid)) {}

  // 1 found, 0 exhausted, -1 budget ran out
  int go(size_t j, uint64_t mask, const State& state) {
    if (budget.spent()) return -1;
    if (j == seg.own.size()) return 1;  // trailing segment never constrains returns
    const std::vector<int>& elems = seg.segments[j];
    const uint64_t full = elems.size() >= 64 ? ~uint64_t{0} : (uint64_t{1} << elems.size()) - 1;
    if (mask == full) {
      const OpRecord& op = *rec[seg.own[j]];
      StepResult r = h.specs.at(op.inv.object)->apply(state.at(op.inv.object), op.inv);
      if (!(r.ret == op.ret)) return 0;
      State next = state;
      next.at(op.inv.object) = r.next;
      path.push_back(seg.own[j]);
      int res = go(j + 1, 0, next);
      if (res != 1) path.pop_back();
      return res;
    }
    std::string key =
        std::to_string(j) + ':' + std::to_string(mask) + ':' + encode_state(state);
    if (dead.count(key)) return 0;
    for (size_t x = 0; x < elems.size(); ++x) {
      if (mask >> x & 1) continue;
      bool ready = true;
      for (size_t y = 0; y < elems.size() && ready; ++y)
        if (y != x && !(mask >> y & 1) && po.reaches(elems[y], elems[x])) ready = false;
      if (!ready) continue;
      const OpRecord& op = *rec[elems[x]];
      StepResult r = h.specs.at(op.inv.object)->apply(state.at(op.inv.object), op.inv);
      State next = state;
      next.at(op.inv.object) = r.next;
      path.push_back(elems[x]);
      int res = go(j, mask | (uint64_t{1} << x), next);
      if (res == 1) return 1;
      path.pop_back();
      if (res == -1) return -1;
    }
    dead.insert(std::move(key));
    return 0;
  }
};

enum class Feas { Yes, No, Budget };

struct FeasResult {
  Feas verdict = Feas::No;
  std::vector<int> serialization;  // dense nodes, complete over all operations
};

FeasResult process_feasible(const History& h, const CausalOrder& po,
                            const std::vector<const OpRecord*>& rec, int pid, Budget& budget) {
  SerializationSearch search(h, po, rec, pid, budget);
  int res = search.go(0, 0, initial_state(h));
  FeasResult f;
  f.verdict = res == 1 ? Feas::Yes : res == 0 ? Feas::No : Feas::Budget;
  if (res == 1) {
    f.serialization = search.path;
    for (int t : first_linear_extension(po, search.seg.segments.back()))
      f.serialization.push_back(t);
  }
  return f;
}

/// Relaxation of SerializationSearch that ignores cross-process edges: own
/// operations interleave with per-process prefixes of the foreign sequences.
/// Every real serialization is such an interleaving, so failure here refutes
/// every causal order at once.
struct RelaxedSearch {
  const History& h;
  int pid;
  Budget& budget;
  std::set<std::string> dead;

  int go(std::vector<size_t>& counts, const State& state) {
    if (budget.spent()) return -1;
    if (counts[pid - 1] == h.locals[pid - 1].size()) return 1;
    std::string key;
    for (size_t c : counts) key += std::to_string(c) + ',';
    key += encode_state(state);
    if (dead.count(key)) return 0;
    for (int p = 1; p <= h.n; ++p) {
      if (counts[p - 1] == h.locals[p - 1].size()) continue;
      const OpRecord& op = h.locals[p - 1][counts[p - 1]];
      StepResult r = h.specs.at(op.inv.object)->apply(state.at(op.inv.object), op.inv);
      if (p == pid && !(r.ret == op.ret)) continue;
      State next = state;
      next.at(op.inv.object) = r.next;
      ++counts[p - 1];
      int res = go(counts, next);
      --counts[p - 1];
      if (res != 0) return res;
    }
    dead.insert(std::move(key));
    return 0;
  }
};

int relaxed_feasible(const History& h, int pid, Budget& budget) {
  RelaxedSearch search{h, pid, budget, {}};
  std::vector<size_t> counts(h.n, 0);
  return search.go(counts, initial_state(h));
}

/// DFS for one total order of all operations extending process order, with
/// every recorded return value reproduced by replay. With use_rt, an
/// operation additionally may not overtake one that responded before it was
/// invoked.
struct TotalOrderSearch {
  const History& h;
  Budget& budget;
  bool use_rt;
  std::set<std::string> dead;
  std::vector<std::string> path;

  bool blocked(const OpRecord& op, const std::vector<size_t>& counts) const {
    for (int q = 1; q <= h.n; ++q) {
      if (counts[q - 1] == h.locals[q - 1].size()) continue;
      const OpRecord& y = h.locals[q - 1][counts[q - 1]];
      if (y.op_id != op.op_id && y.rt->response_t < op.rt->invoke_t) return true;
    }
    return false;
  }

  int go(std::vector<size_t>& counts, const State& state, size_t placed) {
    if (budget.spent()) return -1;
    if (placed == h.total_ops()) return 1;
    std::string key;
    for (size_t c : counts) key += std::to_string(c) + ',';
    key += encode_state(state);
    if (dead.count(key)) return 0;
    for (int p = 1; p <= h.n; ++p) {
      if (counts[p - 1] == h.locals[p - 1].size()) continue;
      const OpRecord& op = h.locals[p - 1][counts[p - 1]];
      if (use_rt && blocked(op, counts)) continue;
      StepResult r = h.specs.at(op.inv.object)->apply(state.at(op.inv.object), op.inv);
      if (!(r.ret == op.ret)) continue;
      State next = state;
      next.at(op.inv.object) = r.next;
      ++counts[p - 1];
      path.push_back(op.op_id);
      int res = go(counts, next, placed + 1);
      --counts[p - 1];
      if (res == 1) return 1;
      path.pop_back();
      if (res == -1) return -1;
    }
    dead.insert(std::move(key));
    return 0;
  }
};

Verdict check_total_order(const History& h, const CheckLimits& lim, bool use_rt) {
  h.validate();
  const char* name = use_rt ? "linearizable" : "sequential";
  enforce_size(h, lim.max_ops ? lim.max_ops : 12, name);
  if (use_rt)
    for (const auto& l : h.locals)
      for (const OpRecord& op : l)
        if (!op.rt) throw MissingTimestamps(op.op_id + " carries no rt interval");
  Verdict v;
  v.condition = name;
  Budget budget{lim.budget};
  TotalOrderSearch search{h, budget, use_rt, {}, {}};
  std::vector<size_t> counts(h.n, 0);
  int res = search.go(counts, initial_state(h), 0);
  if (res == 1) {
    v.accepted = true;
    Witness w;
    w.serializations[0] = search.path;
    v.witness = std::move(w);
  } else if (res == -1) {
    v.unknown = true;
    v.diagnostics.push_back("search budget ran out before any verdict");
  } else {
    v.diagnostics.push_back("no total order over all " + std::to_string(h.total_ops()) +
                            " operations reproduces every recorded return value");
  }
  return v;
}

}  // namespace

Verdict check_causal_certificate(const History& h, const EdgeSet& edges,
                                 const CheckLimits& lim) {
  h.validate();
  enforce_size(h, lim.max_ops ? lim.max_ops : 32, "causal-cert");
  Verdict v;
  v.condition = "causal-cert";
  CausalOrder po;
  try {
    po = CausalOrder::close(h, edges);
  } catch (const CyclicOrder& e) {
    v.diagnostics.push_back(e.what());
    return v;
  }
  auto rec = op_index(h, po);
  Budget budget{lim.budget};
  Witness w;
  std::set<std::pair<std::string, std::string>> uniq(edges.begin(), edges.end());
  w.order_edges.assign(uniq.begin(), uniq.end());
  for (int pid = 1; pid <= h.n; ++pid) {
    FeasResult f = process_feasible(h, po, rec, pid, budget);
    if (f.verdict == Feas::Budget) {
      v.unknown = true;
      v.diagnostics.push_back("search budget ran out at process " + std::to_string(pid));
      return v;
    }
    if (f.verdict == Feas::No) {
      v.diagnostics.push_back("process " + std::to_string(pid) +
                              " has no serialization under the given order that returns its "
                              "recorded values");
      return v;
    }
    for (int node : f.serialization) w.serializations[pid].push_back(po.id(node));
  }
  v.accepted = true;
  v.witness = std::move(w);
  return v;
}

Verdict check_causal(const History& h, const CheckLimits& lim) {
  h.validate();
  enforce_size(h, lim.max_ops ? lim.max_ops : causal_default_max_ops(), "causal");
  Verdict v;
  v.condition = "causal";
  if (h.total_ops() == 0) {
    v.accepted = true;
    v.witness = Witness{};
    return v;
  }
  Budget budget{lim.budget};
  bool budget_out = false;

  for (int pid = 1; pid <= h.n && !budget_out; ++pid) {
    int r = relaxed_feasible(h, pid, budget);
    if (r == -1) budget_out = true;
    if (r == 0) {
      v.diagnostics.push_back("process " + std::to_string(pid) +
                              " cannot reproduce its own return values under any interleaving "
                              "that respects process order, so no causal order exists");
      return v;
    }
  }

  CausalOrder base = CausalOrder::close(h, {});
  auto rec = op_index(h, base);
  const size_t N = base.size();

  std::vector<std::pair<int, int>> pairs;
  for (size_t a = 0; a < N; ++a)
    for (size_t b = 0; b < N; ++b)
      if (a != b && base.pid_of(a) != base.pid_of(b))
        pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));

  // closure := closure ∪ {(x,y) : x reaches a or x==a, y==b or b reaches y}
  auto add_edge_closed = [N](BitMatrix& m, int a, int b) {
    for (size_t x = 0; x < N; ++x)
      if (static_cast<int>(x) == a || m.get(x, a)) {
        m.or_row(x, b);
        m.set(x, b);
      }
  };

  auto next_combination = [](std::vector<size_t>& c, size_t m) {
    size_t k = c.size();
    for (size_t i = k; i-- > 0;) {
      if (c[i] + (k - i) < m) {
        ++c[i];
        for (size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
        return true;
      }
    }
    return false;
  };

  std::set<std::vector<uint64_t>> seen;
  size_t evaluated = 0;

  // Subsets by increasing cardinality: the first acceptance uses as few
  // extra edges as any acceptance can.
  for (size_t k = 0; k <= pairs.size() && !budget_out; ++k) {
    std::vector<size_t> comb(k);
    std::iota(comb.begin(), comb.end(), size_t{0});
    bool more = comb.size() <= pairs.size();
    while (more && !budget_out) {
      if (budget.spent()) {
        budget_out = true;
        break;
      }
      BitMatrix m = base.reach_matrix();
      bool skip = false;
      for (size_t idx : comb) {
        auto [a, b] = pairs[idx];
        if (m.get(b, a) || m.get(a, b)) {  // cycle, or implied by a smaller subset
          skip = true;
          break;
        }
        add_edge_closed(m, a, b);
      }
      if (!skip && seen.insert(m.raw()).second) {
        ++evaluated;
        EdgeSet subset_edges;
        for (size_t idx : comb)
          subset_edges.emplace_back(base.id(pairs[idx].first), base.id(pairs[idx].second));
        CausalOrder po = CausalOrder::close(h, subset_edges);
        Witness w;
        w.order_edges = subset_edges;
        bool all_yes = true;
        for (int pid = 1; pid <= h.n && all_yes; ++pid) {
          FeasResult f = process_feasible(h, po, rec, pid, budget);
          if (f.verdict == Feas::Budget) {
            budget_out = true;
            all_yes = false;
          } else if (f.verdict == Feas::No) {
            all_yes = false;
          } else {
            for (int node : f.serialization) w.serializations[pid].push_back(po.id(node));
          }
        }
        if (all_yes) {
          v.accepted = true;
          v.witness = std::move(w);
          v.diagnostics.push_back("accepted with " + std::to_string(k) +
                                  " causal edges beyond process order after examining " +
                                  std::to_string(evaluated) + " candidate orders");
          return v;
        }
      }
      if (k == 0) break;
      more = next_combination(comb, pairs.size());
    }
  }

  if (!budget_out) {
    v.diagnostics.push_back("rejected: every causal order fails some process (" +
                            std::to_string(evaluated) + " distinct candidate orders examined)");
    return v;
  }

  // Budget ran out. A single legal total order still settles acceptance, so
  // fall back to the sequential search before conceding unknown.
  CheckLimits seq_lim;
  seq_lim.max_ops = h.total_ops();
  seq_lim.budget = lim.budget;
  Verdict seq = check_total_order(h, seq_lim, false);
  if (seq.accepted) {
    const std::vector<std::string>& order = seq.witness->serializations.at(0);
    Witness w;
    for (size_t i = 1; i < order.size(); ++i) {
      int a = base.node_of(order[i - 1]), b = base.node_of(order[i]);
      if (base.pid_of(a) != base.pid_of(b)) w.order_edges.emplace_back(order[i - 1], order[i]);
    }
    for (int pid = 1; pid <= h.n; ++pid) w.serializations[pid] = order;
    v.accepted = true;
    v.witness = std::move(w);
    v.diagnostics.push_back("budget ran out after examining " + std::to_string(evaluated) +
                            " candidate orders; accepted through a single legal total order");
    return v;
  }
  v.unknown = true;
  v.diagnostics.push_back("budget ran out after examining " + std::to_string(evaluated) +
                          " candidate orders, and the total-order fallback " +
                          (seq.unknown ? "is also inconclusive" : "finds no order"));
  return v;
}

Verdict check_causal_memory(const History& h, const CheckLimits& lim) {
  h.validate();
  for (const auto& [obj, spec] : h.specs)
    if (spec->name() != "register")
      throw DomainError("causal-memory checking covers registers only, " + obj + " is a " +
                        spec->name());
  enforce_size(h, lim.max_ops ? lim.max_ops : 12, "causal-memory");
  Verdict v;
  v.condition = "causal-memory";

  EdgeSet wi;
  try {
    wi = write_into_edges(h);
  } catch (const DanglingRead& e) {
    v.diagnostics.push_back(e.what());
    return v;
  }
  CausalOrder po;
  try {
    po = CausalOrder::close(h, wi);
  } catch (const CyclicOrder& e) {
    v.diagnostics.push_back(e.what());
    return v;
  }
  auto rec = op_index(h, po);

  Witness w;
  std::sort(wi.begin(), wi.end());
  w.order_edges = wi;
  Budget budget{lim.budget};

  for (int pid = 1; pid <= h.n; ++pid) {
    // H_{i+w}: own operations plus every write, ascending dense order
    std::vector<int> elems;
    for (size_t x = 0; x < po.size(); ++x)
      if (rec[x]->pid == pid || rec[x]->inv.op_name == "write") elems.push_back(static_cast<int>(x));

    std::map<std::string, Value> init;
    for (const auto& [obj, spec] : h.specs) init.emplace(obj, spec->initial_state().scalar());

    std::set<std::string> dead;
    std::vector<int> path;
    auto encode_regs = [](const std::map<std::string, Value>& regs) {
      std::string out;
      for (const auto& [obj, val] : regs) out += obj + '=' + val.encode() + ';';
      return out;
    };
    // 1 found, 0 exhausted, -1 budget ran out
    std::function<int(uint64_t, const std::map<std::string, Value>&)> go =
        [&](uint64_t mask, const std::map<std::string, Value>& regs) -> int {
      if (budget.spent()) return -1;
      const uint64_t full =
          elems.size() >= 64 ? ~uint64_t{0} : (uint64_t{1} << elems.size()) - 1;
      if (mask == full) return 1;
      std::string key = std::to_string(mask) + ':' + encode_regs(regs);
      if (dead.count(key)) return 0;
      for (size_t x = 0; x < elems.size(); ++x) {
        if (mask >> x & 1) continue;
        bool ready = true;
        for (size_t y = 0; y < elems.size() && ready; ++y)
          if (y != x && !(mask >> y & 1) && po.reaches(elems[y], elems[x])) ready = false;
        if (!ready) continue;
        const OpRecord& op = *rec[elems[x]];
        if (op.inv.op_name == "read" && !(regs.at(op.inv.object) == op.ret)) continue;
        auto next = regs;
        if (op.inv.op_name == "write") next.at(op.inv.object) = op.inv.args.at(0);
        path.push_back(elems[x]);
        int res = go(mask | (uint64_t{1} << x), next);
        if (res == 1) return 1;
        path.pop_back();
        if (res == -1) return -1;
      }
      dead.insert(std::move(key));
      return 0;
    };
    int res = go(0, init);
    if (res == -1) {
      v.unknown = true;
      v.diagnostics.push_back("search budget ran out at process " + std::to_string(pid));
      return v;
    }
    if (res == 0) {
      v.diagnostics.push_back("process " + std::to_string(pid) +
                              " cannot order its reads among the writes so that every read "
                              "returns the latest preceding write");
      return v;
    }
    for (int node : path) w.serializations[pid].push_back(po.id(node));
  }
  v.accepted = true;
  v.witness = std::move(w);
  return v;
}

Verdict check_sequential(const History& h, const CheckLimits& lim) {
  return check_total_order(h, lim, false);
}

Verdict check_linearizable(const History& h, const CheckLimits& lim) {
  return check_total_order(h, lim, true);
}

namespace {

bool is_permutation_of(const std::vector<std::string>& s, std::vector<std::string> expect) {
  std::vector<std::string> got = s;
  std::sort(got.begin(), got.end());
  std::sort(expect.begin(), expect.end());
  return got == expect;
}

}  // namespace

bool check_witness(const History& h, const std::string& condition, const Witness& w,
                   std::vector<std::string>* why) {
  h.validate();
  std::vector<std::string> reasons;
  auto flag = [&](std::string m) { reasons.push_back(std::move(m)); };

  std::vector<std::string> all_ids;
  for (const auto& l : h.locals)
    for (const OpRecord& op : l) all_ids.push_back(op.op_id);

  auto finish = [&]() {
    if (why) *why = reasons;
    return reasons.empty();
  };

  if (condition == "causal" || condition == "causal-cert") {
    CausalOrder po;
    try {
      po = CausalOrder::close(h, w.order_edges);
    } catch (const CyclicOrder& e) {
      flag(e.what());
      return finish();
    }
    auto rec = op_index(h, po);
    for (int pid = 1; pid <= h.n; ++pid) {
      auto it = w.serializations.find(pid);
      if (it == w.serializations.end()) {
        flag("no serialization for process " + std::to_string(pid));
        continue;
      }
      const std::vector<std::string>& S = it->second;
      if (!is_permutation_of(S, all_ids)) {
        flag("process " + std::to_string(pid) +
             ": serialization is not a permutation of all operations");
        continue;
      }
      std::vector<int> nodes;
      for (const std::string& id : S) nodes.push_back(po.node_of(id));
      for (size_t i = 0; i < nodes.size(); ++i)
        for (size_t j = i + 1; j < nodes.size(); ++j)
          if (po.reaches(nodes[j], nodes[i]))
            flag("process " + std::to_string(pid) + ": " + S[j] + " must precede " + S[i]);
      for (size_t q = 0; q < nodes.size(); ++q) {
        if (rec[nodes[q]]->pid != pid) continue;
        std::vector<int> prefix(nodes.begin(), nodes.begin() + q);
        std::sort(prefix.begin(), prefix.end());
        if (prefix != po.causal_past(nodes[q]))
          flag("process " + std::to_string(pid) + ": the operations before " + S[q] +
               " are not exactly its causal past");
      }
      State st = initial_state(h);
      for (int node : nodes) {
        const OpRecord& op = *rec[node];
        StepResult r = h.specs.at(op.inv.object)->apply(st.at(op.inv.object), op.inv);
        st.at(op.inv.object) = r.next;
        if (op.pid == pid && !(r.ret == op.ret))
          flag("process " + std::to_string(pid) + ": " + op.op_id + " replays to " +
               r.ret.encode() + " but recorded " + op.ret.encode());
      }
    }
    return finish();
  }

  if (condition == "sequential" || condition == "linearizable") {
    CausalOrder po = CausalOrder::close(h, {});
    auto rec = op_index(h, po);
    auto it = w.serializations.find(0);
    if (it == w.serializations.end()) {
      flag("no global serialization (key 0)");
      return finish();
    }
    const std::vector<std::string>& S = it->second;
    if (!is_permutation_of(S, all_ids)) {
      flag("global serialization is not a permutation of all operations");
      return finish();
    }
    std::vector<int> nodes;
    for (const std::string& id : S) nodes.push_back(po.node_of(id));
    for (size_t i = 0; i < nodes.size(); ++i)
      for (size_t j = i + 1; j < nodes.size(); ++j)
        if (po.reaches(nodes[j], nodes[i])) flag(S[j] + " must precede " + S[i]);
    State st = initial_state(h);
    for (int node : nodes) {
      const OpRecord& op = *rec[node];
      StepResult r = h.specs.at(op.inv.object)->apply(st.at(op.inv.object), op.inv);
      st.at(op.inv.object) = r.next;
      if (!(r.ret == op.ret))
        flag(op.op_id + " replays to " + r.ret.encode() + " but recorded " + op.ret.encode());
    }
    if (condition == "linearizable") {
      for (int node : nodes)
        if (!rec[node]->rt) {
          flag(rec[node]->op_id + " carries no rt interval");
          return finish();
        }
      for (size_t i = 0; i < nodes.size(); ++i)
        for (size_t j = i + 1; j < nodes.size(); ++j)
          if (rec[nodes[j]]->rt->response_t < rec[nodes[i]]->rt->invoke_t)
            flag(S[j] + " responded before " + S[i] + " was invoked yet is ordered after it");
    }
    return finish();
  }

  if (condition == "causal-memory") {
    EdgeSet wi;
    try {
      wi = write_into_edges(h);
    } catch (const Error& e) {
      flag(e.what());
      return finish();
    }
    std::sort(wi.begin(), wi.end());
    EdgeSet given = w.order_edges;
    std::sort(given.begin(), given.end());
    if (wi != given) flag("order_edges are not the writes-into relation of the history");
    CausalOrder po;
    try {
      po = CausalOrder::close(h, wi);
    } catch (const CyclicOrder& e) {
      flag(e.what());
      return finish();
    }
    auto rec = op_index(h, po);
    for (int pid = 1; pid <= h.n; ++pid) {
      std::vector<std::string> expect;
      for (size_t x = 0; x < po.size(); ++x)
        if (rec[x]->pid == pid || rec[x]->inv.op_name == "write") expect.push_back(po.id(x));
      auto it = w.serializations.find(pid);
      if (it == w.serializations.end()) {
        flag("no serialization for process " + std::to_string(pid));
        continue;
      }
      const std::vector<std::string>& S = it->second;
      if (!is_permutation_of(S, expect)) {
        flag("process " + std::to_string(pid) +
             ": serialization is not a permutation of its operations plus all writes");
        continue;
      }
      std::vector<int> nodes;
      for (const std::string& id : S) nodes.push_back(po.node_of(id));
      for (size_t i = 0; i < nodes.size(); ++i)
        for (size_t j = i + 1; j < nodes.size(); ++j)
          if (po.reaches(nodes[j], nodes[i]))
            flag("process " + std::to_string(pid) + ": " + S[j] + " must precede " + S[i]);
      std::map<std::string, Value> regs;
      for (const auto& [obj, spec] : h.specs) regs.emplace(obj, spec->initial_state().scalar());
      for (int node : nodes) {
        const OpRecord& op = *rec[node];
        if (op.inv.op_name == "write") {
          regs.at(op.inv.object) = op.inv.args.at(0);
        } else if (!(regs.at(op.inv.object) == op.ret)) {
          flag("process " + std::to_string(pid) + ": " + op.op_id + " reads " +
               op.ret.encode() + " but the latest preceding write left " +
               regs.at(op.inv.object).encode());
        }
      }
    }
    return finish();
  }

  throw DomainError("unknown condition " + condition);
}

}  // namespace ccobj
