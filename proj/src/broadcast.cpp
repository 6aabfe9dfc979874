#include "ccobj/broadcast.hpp"

#include <algorithm>

#include "ccobj/errors.hpp"

namespace ccobj {

CausalBroadcastNode::CausalBroadcastNode(int n, int pid, DeliverFn deliver)
    : n_(n), pid_(pid), deliver_fn_(std::move(deliver)), delivered_(n, 0) {
  if (n < 1 || pid < 1 || pid > n)
    throw DomainError("node pid " + std::to_string(pid) + " outside 1.." + std::to_string(n));
}

BMessage CausalBroadcastNode::broadcast(OperationPayload payload) {
  ++sent_;
  BMessage m;
  m.sender = pid_;
  m.seq = sent_;
  m.vclock = delivered_;
  m.vclock[pid_ - 1] = sent_;
  m.payload = std::move(payload);
  seen_.emplace(m.sender, m.seq);
  deliver(m);
  drain();
  return m;
}

void CausalBroadcastNode::receive(const BMessage& m) {
  if (m.sender < 1 || m.sender > n_ || m.vclock.size() != static_cast<size_t>(n_) ||
      m.seq == 0 || m.vclock[m.sender - 1] != m.seq)
    throw ParseError("malformed broadcast message from sender " + std::to_string(m.sender));
  if (!seen_.emplace(m.sender, m.seq).second)
    throw DuplicateMessage("message " + std::to_string(m.seq) + " from " +
                           std::to_string(m.sender) + " received twice");
  pending_.push_back(m);
  drain();
}

bool CausalBroadcastNode::deliverable(const BMessage& m) const {
  if (m.vclock[m.sender - 1] != delivered_[m.sender - 1] + 1) return false;
  for (int k = 1; k <= n_; ++k)
    if (k != m.sender && m.vclock[k - 1] > delivered_[k - 1]) return false;
  return true;
}

void CausalBroadcastNode::deliver(const BMessage& m) {
  delivered_[m.sender - 1] += 1;
  if (delivered_[m.sender - 1] != m.vclock[m.sender - 1])
    throw Error("delivery out of sender order: message " + std::to_string(m.seq) + " from " +
                std::to_string(m.sender) + " after " +
                std::to_string(delivered_[m.sender - 1] - 1));
  for (int k = 1; k <= n_; ++k)
    if (k != m.sender && delivered_[k - 1] < m.vclock[k - 1])
      throw Error("delivery ahead of its dependencies: message " + std::to_string(m.seq) +
                  " from " + std::to_string(m.sender));
  if (deliver_fn_) deliver_fn_(m);
}

void CausalBroadcastNode::drain() {
  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (auto it = pending_.begin(); it != pending_.end(); ++it) {
      if (!deliverable(*it)) continue;
      BMessage m = std::move(*it);
      pending_.erase(it);
      deliver(m);
      progressed = true;
      break;
    }
  }
}

TotalOrderNode::TotalOrderNode(int n, int pid, DeliverFn deliver)
    : n_(n), pid_(pid), deliver_fn_(std::move(deliver)) {
  if (n < 1 || pid < 1 || pid > n)
    throw DomainError("node pid " + std::to_string(pid) + " outside 1.." + std::to_string(n));
}

std::vector<TOMessage> TotalOrderNode::submit(const OperationPayload& payload) {
  if (pid_ == 1) return stamp(payload);
  ++sent_;
  TOMessage req;
  req.kind = TOMessage::Kind::Request;
  req.sender = pid_;
  req.seq = sent_;
  req.payload = payload;
  return {req};
}

std::vector<TOMessage> TotalOrderNode::stamp(const OperationPayload& payload) {
  ++gseq_;
  buffer_.emplace(gseq_, payload);
  drain();
  TOMessage out;
  out.kind = TOMessage::Kind::Stamped;
  out.sender = 1;
  out.seq = gseq_;
  out.gseq = gseq_;
  out.payload = payload;
  return {out};
}

std::vector<TOMessage> TotalOrderNode::receive(const TOMessage& m) {
  if (m.kind == TOMessage::Kind::Request) {
    if (pid_ != 1) throw Error("request routed to non-sequencer node " + std::to_string(pid_));
    if (!seen_requests_.emplace(m.sender, m.seq).second)
      throw DuplicateMessage("request " + std::to_string(m.seq) + " from " +
                             std::to_string(m.sender) + " received twice");
    return stamp(m.payload);
  }
  if (pid_ == 1) throw Error("sequencer received its own stamped broadcast");
  if (m.gseq < next_ || buffer_.count(m.gseq))
    throw DuplicateMessage("stamp " + std::to_string(m.gseq) + " received twice");
  buffer_.emplace(m.gseq, m.payload);
  drain();
  return {};
}

void TotalOrderNode::drain() {
  for (auto it = buffer_.find(next_); it != buffer_.end(); it = buffer_.find(next_)) {
    OperationPayload p = std::move(it->second);
    buffer_.erase(it);
    uint64_t g = next_++;
    if (deliver_fn_) deliver_fn_(g, p);
  }
}

}  // namespace ccobj
