#include "ccobj/history.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "ccobj/errors.hpp"

namespace ccobj {

std::string make_op_id(int pid, int local_index) {
  return "p" + std::to_string(pid) + "." + std::to_string(local_index);
}

size_t History::total_ops() const {
  size_t t = 0;
  for (const auto& l : locals) t += l.size();
  return t;
}

const OpRecord& History::at(int pid, int local_index) const {
  return locals.at(pid - 1).at(local_index);
}

void History::validate() const {
  if (n < 0 || locals.size() != static_cast<size_t>(n))
    throw ParseError("history has " + std::to_string(locals.size()) +
                     " local sequences for n=" + std::to_string(n));
  std::set<std::string> seen;
  for (int pid = 1; pid <= n; ++pid) {
    const auto& l = locals[pid - 1];
    for (size_t j = 0; j < l.size(); ++j) {
      const OpRecord& op = l[j];
      if (op.pid != pid)
        throw ParseError(op.op_id + ": pid " + std::to_string(op.pid) +
                         " recorded under process " + std::to_string(pid));
      if (op.local_index != static_cast<int>(j))
        throw ParseError(op.op_id + ": local_index " + std::to_string(op.local_index) +
                         " at position " + std::to_string(j));
      if (op.op_id != make_op_id(pid, static_cast<int>(j)))
        throw ParseError("op_id " + op.op_id + " does not match p" + std::to_string(pid) +
                         "." + std::to_string(j));
      if (!seen.insert(op.op_id).second) throw ParseError("duplicate op_id " + op.op_id);
      if (!specs.count(op.inv.object))
        throw ParseError(op.op_id + " touches undeclared object " + op.inv.object);
      if (op.rt) {
        if (op.rt->response_t < op.rt->invoke_t)
          throw ParseError(op.op_id + ": response precedes invocation");
        if (j > 0 && l[j - 1].rt && op.rt->invoke_t < l[j - 1].rt->response_t)
          throw ParseError(op.op_id + ": invoked before the previous response");
      }
    }
  }
}

History History::of(int n, std::map<std::string, SpecPtr> specs,
                    std::vector<std::vector<std::pair<Invocation, Value>>> rows) {
  History h;
  h.n = n;
  h.specs = std::move(specs);
  h.locals.resize(n);
  for (int pid = 1; pid <= n; ++pid) {
    if (pid - 1 >= static_cast<int>(rows.size())) break;
    for (size_t j = 0; j < rows[pid - 1].size(); ++j) {
      auto& [inv, ret] = rows[pid - 1][j];
      OpRecord op;
      op.op_id = make_op_id(pid, static_cast<int>(j));
      op.pid = pid;
      op.local_index = static_cast<int>(j);
      op.inv = std::move(inv);
      op.ret = std::move(ret);
      h.locals[pid - 1].push_back(std::move(op));
    }
  }
  h.validate();
  return h;
}

EdgeSet process_order_edges(const History& h) {
  EdgeSet edges;
  for (const auto& l : h.locals)
    for (size_t j = 1; j < l.size(); ++j)
      edges.emplace_back(l[j - 1].op_id, l[j].op_id);
  return edges;
}

EdgeSet write_into_edges(const History& h) {
  // (object, encoded value) -> writer op_id, for registers only
  std::map<std::pair<std::string, std::string>, std::string> writer;
  std::map<std::string, Value> initial;
  for (const auto& [obj, spec] : h.specs)
    if (spec->name() == "register") initial.emplace(obj, spec->initial_state().scalar());

  for (const auto& l : h.locals)
    for (const OpRecord& op : l) {
      if (!initial.count(op.inv.object) || op.inv.op_name != "write") continue;
      const Value& v = op.inv.args.at(0);
      if (v == initial.at(op.inv.object))
        throw AmbiguousWrite(op.op_id + " writes the initial value of " + op.inv.object);
      auto [it, fresh] = writer.emplace(std::make_pair(op.inv.object, v.encode()), op.op_id);
      if (!fresh)
        throw AmbiguousWrite(op.inv.object + " value " + v.encode() + " written by both " +
                             it->second + " and " + op.op_id);
    }

  EdgeSet edges;
  for (const auto& l : h.locals)
    for (const OpRecord& op : l) {
      if (!initial.count(op.inv.object) || op.inv.op_name != "read") continue;
      if (op.ret == initial.at(op.inv.object)) continue;  // implicit initial write
      auto it = writer.find(std::make_pair(op.inv.object, op.ret.encode()));
      if (it == writer.end())
        throw DanglingRead(op.op_id + " reads " + op.ret.encode() + " from " + op.inv.object +
                           " which nothing wrote");
      edges.emplace_back(it->second, op.op_id);
    }
  return edges;
}

std::string BitMatrix::digest() const {
  uint64_t hash = 0xcbf29ce484222325ull;
  for (uint64_t w : bits_)
    for (int b = 0; b < 8; ++b) {
      hash ^= (w >> (8 * b)) & 0xff;
      hash *= 0x100000001b3ull;
    }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

int CausalOrder::node_of(const std::string& op_id) const {
  auto it = index_.find(op_id);
  return it == index_.end() ? -1 : it->second;
}

std::vector<int> CausalOrder::causal_past(int op) const {
  std::vector<int> past;
  for (int x = 0; x < static_cast<int>(size()); ++x)
    if (reach_.get(x, op)) past.push_back(x);
  return past;
}

namespace {

// Shortest base-edge cycle through node v, as op_ids ending where they start.
std::vector<std::string> find_cycle(const CausalOrder& po,
                                    const std::vector<std::vector<int>>& adj, int v) {
  std::vector<int> parent(po.size(), -1);
  std::deque<int> queue;
  for (int s : adj[v])
    if (parent[s] == -1 && s != v) {
      parent[s] = v;
      queue.push_back(s);
    }
  int tail = -1;
  if (std::count(adj[v].begin(), adj[v].end(), v)) tail = v;
  while (tail == -1 && !queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    for (int nxt : adj[cur]) {
      if (nxt == v) {
        tail = cur;
        break;
      }
      if (parent[nxt] == -1) {
        parent[nxt] = cur;
        queue.push_back(nxt);
      }
    }
  }
  std::vector<std::string> cycle{po.id(v)};
  std::vector<int> back;
  for (int cur = tail; cur != -1 && cur != v; cur = parent[cur]) back.push_back(cur);
  for (auto it = back.rbegin(); it != back.rend(); ++it) cycle.push_back(po.id(*it));
  cycle.push_back(po.id(v));
  return cycle;
}

}  // namespace

CausalOrder CausalOrder::close(const History& h, const EdgeSet& edges) {
  CausalOrder po;
  for (const auto& l : h.locals)
    for (const OpRecord& op : l) po.ids_.push_back(op.op_id);
  std::sort(po.ids_.begin(), po.ids_.end());
  po.pids_.resize(po.ids_.size());
  for (size_t i = 0; i < po.ids_.size(); ++i) po.index_[po.ids_[i]] = static_cast<int>(i);
  for (const auto& l : h.locals)
    for (const OpRecord& op : l) po.pids_[po.index_.at(op.op_id)] = op.pid;

  std::set<std::pair<std::string, std::string>> base;
  for (auto& e : process_order_edges(h)) base.insert(e);
  for (auto& e : edges) base.insert(e);
  po.base_.assign(base.begin(), base.end());

  const size_t n = po.ids_.size();
  po.reach_ = BitMatrix(n);
  std::vector<std::vector<int>> adj(n);
  for (const auto& [a, b] : po.base_) {
    int ia = po.node_of(a), ib = po.node_of(b);
    if (ia < 0) throw ParseError("order edge names unknown operation " + a);
    if (ib < 0) throw ParseError("order edge names unknown operation " + b);
    po.reach_.set(ia, ib);
    adj[ia].push_back(ib);
  }
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i < n; ++i)
      if (po.reach_.get(i, k)) po.reach_.or_row(i, k);

  for (size_t v = 0; v < n; ++v)
    if (po.reach_.get(v, v)) throw CyclicOrder(find_cycle(po, adj, static_cast<int>(v)));
  return po;
}

SegmentStructure segment_structure(const CausalOrder& po, const History& h, int pid) {
  SegmentStructure s;
  for (const OpRecord& op : h.locals.at(pid - 1)) s.own.push_back(po.node_of(op.op_id));

  std::vector<char> consumed(po.size(), 0);
  for (int o : s.own) consumed[o] = 1;
  for (size_t j = 0; j < s.own.size(); ++j) {
    std::vector<int> seg;
    for (int x : po.causal_past(s.own[j]))
      if (!consumed[x]) {
        seg.push_back(x);
        consumed[x] = 1;
      }
    s.segments.push_back(std::move(seg));
  }
  std::vector<int> trailing;
  for (int x = 0; x < static_cast<int>(po.size()); ++x)
    if (!consumed[x]) trailing.push_back(x);
  s.segments.push_back(std::move(trailing));
  return s;
}

namespace {

struct ExtensionSearch {
  const CausalOrder& po;
  const std::vector<int>& elems;
  size_t budget;
  std::vector<char> placed;
  std::vector<int> current;
  LinearExtensions out;

  ExtensionSearch(const CausalOrder& po, const std::vector<int>& elems, size_t budget)
      : po(po), elems(elems), budget(budget), placed(po.size(), 0) {}

  bool ready(int x) const {
    for (int y : elems)
      if (!placed[y] && po.reaches(y, x)) return false;
    return true;
  }

  // Returns false once the budget overflows, aborting the enumeration.
  bool walk() {
    if (current.size() == elems.size()) {
      if (out.orders.size() == budget) {
        out.truncated = true;
        return false;
      }
      out.orders.push_back(current);
      return true;
    }
    for (int x : elems) {
      if (placed[x] || !ready(x)) continue;
      placed[x] = 1;
      current.push_back(x);
      bool keep = walk();
      current.pop_back();
      placed[x] = 0;
      if (!keep) return false;
    }
    return true;
  }
};

}  // namespace

LinearExtensions linear_extensions(const CausalOrder& po, const std::vector<int>& elems,
                                   size_t budget) {
  ExtensionSearch search(po, elems, budget);
  search.walk();
  return std::move(search.out);
}

std::vector<int> first_linear_extension(const CausalOrder& po, const std::vector<int>& elems) {
  std::vector<char> placed(po.size(), 0);
  std::vector<int> order;
  while (order.size() < elems.size()) {
    bool advanced = false;
    for (int x : elems) {
      if (placed[x]) continue;
      bool ready = true;
      for (int y : elems)
        if (!placed[y] && po.reaches(y, x)) {
          ready = false;
          break;
        }
      if (ready) {
        placed[x] = 1;
        order.push_back(x);
        advanced = true;
        break;
      }
    }
    if (!advanced) throw CyclicOrder({"<restriction>"});
  }
  return order;
}

bool is_linear_extension(const CausalOrder& po, const std::vector<int>& elems,
                         const std::vector<int>& order) {
  std::vector<int> a = elems, b = order;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) return false;
  for (size_t i = 0; i < order.size(); ++i)
    for (size_t j = i + 1; j < order.size(); ++j)
      if (po.reaches(order[j], order[i])) return false;
  return true;
}

}  // namespace ccobj
