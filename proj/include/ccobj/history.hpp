#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccobj/objects.hpp"

namespace ccobj {

struct RtInterval {
  int64_t invoke_t = 0;
  int64_t response_t = 0;
  friend bool operator==(const RtInterval&, const RtInterval&) = default;
};

/// One completed operation. op_id has the form "p<pid>.<local_index>".
struct OpRecord {
  std::string op_id;
  int pid = 0;  // 1..n
  Invocation inv;
  Value ret;
  int local_index = 0;  // position in L_pid, 0-based
  std::optional<RtInterval> rt;
};

std::string make_op_id(int pid, int local_index);

/// The tuple <L_1, ..., L_n> of per-process operation sequences, plus the
/// specs of the objects they touch.
struct History {
  int n = 0;
  std::map<std::string, SpecPtr> specs;        // object id -> spec
  std::vector<std::vector<OpRecord>> locals;   // index pid-1

  size_t total_ops() const;
  const OpRecord& at(int pid, int local_index) const;

  /// Checks pid ranges, op_id shape, (pid, local_index) uniqueness,
  /// rt ordering, and that every invocation names a known object.
  /// Throws ParseError on violation.
  void validate() const;

  /// Convenience builder: locals given as (object, op, args, ret) rows.
  static History of(int n, std::map<std::string, SpecPtr> specs,
                    std::vector<std::vector<std::pair<Invocation, Value>>> rows);
};

using EdgeSet = std::vector<std::pair<std::string, std::string>>;

/// Consecutive-pair edges of each L_i; transitive closure supplies the rest.
EdgeSet process_order_edges(const History& h);

/// Register-only write-into edges: one edge from the unique write of v into
/// R to every read of R returning v. Reads of the initial value map to the
/// implicit initial write and produce no edge. Throws AmbiguousWrite if one
/// register sees two writes of the same value, DanglingRead if a read
/// returns a value that was never written and is not the initial value.
EdgeSet write_into_edges(const History& h);

class BitMatrix {
 public:
  explicit BitMatrix(size_t n = 0)
      : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

  size_t size() const { return n_; }
  bool get(size_t i, size_t j) const {
    return (bits_[i * words_ + j / 64] >> (j % 64)) & 1;
  }
  void set(size_t i, size_t j) { bits_[i * words_ + j / 64] |= uint64_t{1} << (j % 64); }
  void or_row(size_t dst, size_t src) {
    for (size_t w = 0; w < words_; ++w) bits_[dst * words_ + w] |= bits_[src * words_ + w];
  }
  const std::vector<uint64_t>& raw() const { return bits_; }
  std::string digest() const;

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  size_t n_;
  size_t words_;
  std::vector<uint64_t> bits_;
};

/// A strict partial order over the operations of a History: the transitive
/// closure of process order plus a supplied edge set. Nodes are indexed
/// densely in lexicographic op_id order.
class CausalOrder {
 public:
  /// Builds the closure of process-order ∪ edges. Throws CyclicOrder (with a
  /// witness cycle) if the union is cyclic.
  static CausalOrder close(const History& h, const EdgeSet& edges);

  size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(int node) const { return ids_[node]; }
  int pid_of(int node) const { return pids_[node]; }
  int node_of(const std::string& op_id) const;  // -1 if absent

  /// Strict reachability a ->po b.
  bool reaches(int a, int b) const { return reach_.get(a, b); }
  bool comparable(int a, int b) const { return reaches(a, b) || reaches(b, a); }

  /// Strict predecessors of op, ascending dense index.
  std::vector<int> causal_past(int op) const;

  /// The generating edges this order was closed from (process order ∪ extra),
  /// as op_id pairs, sorted.
  const EdgeSet& base_edges() const { return base_; }

  const BitMatrix& reach_matrix() const { return reach_; }

 private:
  std::vector<std::string> ids_;
  std::vector<int> pids_;
  std::map<std::string, int> index_;
  BitMatrix reach_;
  EdgeSet base_;
};

/// The segment decomposition of a causal-past-constrained serialization for
/// process `pid`: writing o_1..o_k for the process's own operations,
/// segments[j] (j < k) holds the foreign operations that must appear between
/// o_j-1 and o_j, and segments[k] (the trailing T) holds everything left
/// over. Every causal-past-constrained serialization for `pid` is exactly
/// ext(segments[0]) o_1 ext(segments[1]) o_2 ... o_k ext(segments[k]) with
/// each ext a linear extension of the order restricted to the segment.
struct SegmentStructure {
  std::vector<int> own;                 // dense nodes of p_i, process order
  std::vector<std::vector<int>> segments;  // own.size() + 1 entries, ascending
};

SegmentStructure segment_structure(const CausalOrder& po, const History& h, int pid);

struct LinearExtensions {
  std::vector<std::vector<int>> orders;
  bool truncated = false;  // budget exhausted before the enumeration finished
};

/// Distinct linear extensions of po restricted to `elems`, lexicographic by
/// op_id, at most `budget` of them. Exhaustive iff not truncated.
LinearExtensions linear_extensions(const CausalOrder& po, const std::vector<int>& elems,
                                   size_t budget);

/// One deterministic linear extension (lexicographic greedy).
std::vector<int> first_linear_extension(const CausalOrder& po, const std::vector<int>& elems);

/// True iff `order` lists each element of `elems` once and respects po.
bool is_linear_extension(const CausalOrder& po, const std::vector<int>& elems,
                         const std::vector<int>& order);

}  // namespace ccobj
