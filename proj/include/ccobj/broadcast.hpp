#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ccobj/value.hpp"

namespace ccobj {

/// What travels between replicas: enough to replay one invocation anywhere.
struct OperationPayload {
  int pid = 0;
  int op_index = 0;  // position in the sender's local sequence, 0-based
  std::string object;
  std::string op_name;
  std::vector<Value> args;
};

struct BMessage {
  int sender = 0;
  uint64_t seq = 0;  // per-sender broadcast counter, from 1
  std::vector<uint64_t> vclock;
  OperationPayload payload;
};

/// Vector-clock causal broadcast. A broadcast stamps the sender's own entry
/// with its send counter and every other entry with its delivered count, and
/// self-delivers immediately. A received message waits until it is the next
/// from its sender and everything it depends on has been delivered; each
/// delivery re-scans the buffer until nothing more can go.
class CausalBroadcastNode {
 public:
  using DeliverFn = std::function<void(const BMessage&)>;

  CausalBroadcastNode(int n, int pid, DeliverFn deliver);

  /// Stamps and self-delivers; the returned message goes to every peer.
  BMessage broadcast(OperationPayload payload);

  /// Throws DuplicateMessage on a (sender, seq) seen before.
  void receive(const BMessage& m);

  const std::vector<uint64_t>& delivered() const { return delivered_; }
  size_t pending() const { return pending_.size(); }

 private:
  bool deliverable(const BMessage& m) const;
  void deliver(const BMessage& m);
  void drain();

  int n_;
  int pid_;
  DeliverFn deliver_fn_;
  uint64_t sent_ = 0;
  std::vector<uint64_t> delivered_;
  std::vector<BMessage> pending_;
  std::set<std::pair<int, uint64_t>> seen_;
};

struct TOMessage {
  enum class Kind { Request, Stamped };
  Kind kind = Kind::Request;
  int sender = 0;
  uint64_t seq = 0;    // per-sender counter for requests, the stamp for stamped
  uint64_t gseq = 0;   // stamped only
  OperationPayload payload;
};

/// Total-order broadcast through a fixed sequencer (process 1). Everyone
/// else submits a Request to the sequencer, which assigns the next global
/// sequence number and broadcasts a Stamped copy; replicas deliver strictly
/// in stamp order, buffering anything that arrives early. The submitter's
/// own operation completes only when its stamped copy comes back.
class TotalOrderNode {
 public:
  using DeliverFn = std::function<void(uint64_t gseq, const OperationPayload&)>;

  TotalOrderNode(int n, int pid, DeliverFn deliver);

  /// Messages to put on the wire: a Request to the sequencer, or (from the
  /// sequencer itself) a Stamped broadcast for every peer.
  std::vector<TOMessage> submit(const OperationPayload& payload);

  /// May return follow-up messages (the sequencer answers Requests).
  std::vector<TOMessage> receive(const TOMessage& m);

  uint64_t delivered_through() const { return next_ - 1; }
  size_t pending() const { return buffer_.size(); }

 private:
  std::vector<TOMessage> stamp(const OperationPayload& payload);
  void drain();

  int n_;
  int pid_;
  DeliverFn deliver_fn_;
  uint64_t sent_ = 0;
  uint64_t gseq_ = 0;
  uint64_t next_ = 1;
  std::map<uint64_t, OperationPayload> buffer_;
  std::set<std::pair<int, uint64_t>> seen_requests_;
};

}  // namespace ccobj
