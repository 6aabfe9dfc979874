#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <vector>

#include "ccobj/broadcast.hpp"
#include "ccobj/rng.hpp"

using namespace ccobj;

namespace {

OperationPayload payload(int pid, int idx) {
  return OperationPayload{pid, idx, "S", "push", {Value(static_cast<int64_t>(idx))}};
}

// Key for the delivery log: (sender, seq) identifies a broadcast uniquely.
using MsgKey = std::pair<int, uint64_t>;

MsgKey key(const BMessage& m) { return {m.sender, m.seq}; }

}  // namespace

TEST_CASE("vector clocks advance entrywise with deliveries") {
  std::vector<std::vector<MsgKey>> logs(4);
  std::vector<std::unique_ptr<CausalBroadcastNode>> nodes;
  for (int pid = 1; pid <= 3; ++pid) {
    nodes.push_back(std::make_unique<CausalBroadcastNode>(
        3, pid, [&logs, pid](const BMessage& m) { logs[pid].push_back(key(m)); }));
  }

  BMessage a = nodes[0]->broadcast(payload(1, 0));
  CHECK(a.vclock == std::vector<uint64_t>{1, 0, 0});
  CHECK(logs[1] == std::vector<MsgKey>{{1, 1}});  // senders deliver to themselves

  nodes[1]->receive(a);
  BMessage b = nodes[1]->broadcast(payload(2, 0));
  CHECK(b.vclock == std::vector<uint64_t>{1, 1, 0});

  nodes[0]->receive(b);
  BMessage c = nodes[0]->broadcast(payload(1, 1));
  CHECK(c.vclock == std::vector<uint64_t>{2, 1, 0});
  CHECK(logs[1] == std::vector<MsgKey>{{1, 1}, {2, 1}, {1, 2}});
}

TEST_CASE("a message arriving before its dependencies waits for them") {
  std::vector<MsgKey> log;
  CausalBroadcastNode n1(3, 1, [](const BMessage&) {});
  CausalBroadcastNode n2(3, 2, [](const BMessage&) {});
  CausalBroadcastNode n3(3, 3, [&log](const BMessage& m) { log.push_back(key(m)); });

  BMessage a = n1.broadcast(payload(1, 0));
  n2.receive(a);
  BMessage b = n2.broadcast(payload(2, 0));

  n3.receive(b);  // depends on a, which has not arrived yet
  CHECK(log.empty());
  CHECK(n3.pending() == 1);

  n3.receive(a);  // unblocks both, in dependency order
  CHECK(log == std::vector<MsgKey>{{1, 1}, {2, 1}});
  CHECK(n3.pending() == 0);
}

TEST_CASE("replayed messages are refused") {
  CausalBroadcastNode n1(2, 1, [](const BMessage&) {});
  CausalBroadcastNode n2(2, 2, [](const BMessage&) {});
  BMessage a = n1.broadcast(payload(1, 0));
  n2.receive(a);
  CHECK_THROWS_AS(n2.receive(a), DuplicateMessage);

  // a buffered copy counts as seen too
  BMessage b = n1.broadcast(payload(1, 1));
  CausalBroadcastNode n3(2, 2, [](const BMessage&) {});
  n3.receive(b);  // waits for a
  CHECK(n3.pending() == 1);
  CHECK_THROWS_AS(n3.receive(b), DuplicateMessage);
}

TEST_CASE("random shuffles never break delivery order guarantees") {
  Rng rng(2024);
  for (int round = 0; round < 50; ++round) {
    const int n = 2 + static_cast<int>(rng.pick(3));
    std::vector<std::vector<MsgKey>> logs(n + 1);
    std::vector<std::unique_ptr<CausalBroadcastNode>> nodes(n + 1);
    for (int pid = 1; pid <= n; ++pid) {
      nodes[pid] = std::make_unique<CausalBroadcastNode>(
          n, pid, [&logs, pid](const BMessage& m) { logs[pid].push_back(key(m)); });
    }

    // All messages with the dependency set observed at broadcast time;
    // given[dst] tracks what each node has been handed (delivered or not).
    std::vector<BMessage> sent;
    std::map<MsgKey, std::set<MsgKey>> deps;
    std::vector<std::set<MsgKey>> given(n + 1);
    const int total = 4 + static_cast<int>(rng.pick(8));
    for (int i = 0; i < total; ++i) {
      int pid = 1 + static_cast<int>(rng.pick(n));
      std::set<MsgKey> before(logs[pid].begin(), logs[pid].end());
      BMessage m = nodes[pid]->broadcast(payload(pid, 0));
      deps[key(m)] = before;
      given[pid].insert(key(m));
      sent.push_back(m);

      // occasionally let some other node catch up mid-stream
      if (rng.pick(2) == 0) {
        int dst = 1 + static_cast<int>(rng.pick(n));
        for (const BMessage& old : sent) {
          if (old.sender == dst || !given[dst].insert(key(old)).second) continue;
          nodes[dst]->receive(old);
        }
      }
    }

    // deliver the rest in a random order per recipient
    for (int dst = 1; dst <= n; ++dst) {
      std::vector<BMessage> rest;
      for (const BMessage& m : sent)
        if (m.sender != dst && !given[dst].count(key(m))) rest.push_back(m);
      for (size_t i = rest.size(); i > 1; --i)
        std::swap(rest[i - 1], rest[rng.pick(i)]);
      for (const BMessage& m : rest) nodes[dst]->receive(m);
    }

    for (int dst = 1; dst <= n; ++dst) {
      CAPTURE(round);
      CAPTURE(dst);
      // completeness: everyone ends with every message exactly once
      CHECK(logs[dst].size() == sent.size());
      CHECK(std::set<MsgKey>(logs[dst].begin(), logs[dst].end()).size() ==
            sent.size());
      CHECK(nodes[dst]->pending() == 0);

      std::map<MsgKey, size_t> pos;
      for (size_t i = 0; i < logs[dst].size(); ++i) pos[logs[dst][i]] = i;
      for (const BMessage& m : sent) {
        // per-sender order
        if (m.seq > 1) CHECK(pos.at({m.sender, m.seq - 1}) < pos.at(key(m)));
        // everything the sender had seen comes first
        for (const MsgKey& d : deps.at(key(m))) CHECK(pos.at(d) < pos.at(key(m)));
      }
    }
  }
}

TEST_CASE("the sequencer hands out consecutive global stamps") {
  std::vector<std::vector<std::pair<uint64_t, int>>> logs(4);
  std::vector<std::unique_ptr<TotalOrderNode>> nodes(4);
  for (int pid = 1; pid <= 3; ++pid) {
    nodes[pid] = std::make_unique<TotalOrderNode>(
        3, pid, [&logs, pid](uint64_t gseq, const OperationPayload& p) {
          logs[pid].push_back({gseq, p.pid});
        });
  }

  // p2 submits: the request routes through the sequencer, p1
  std::vector<TOMessage> out = nodes[2]->submit(payload(2, 0));
  REQUIRE(out.size() == 1);
  CHECK(out[0].kind == TOMessage::Kind::Request);
  std::vector<TOMessage> stamped = nodes[1]->receive(out[0]);
  REQUIRE(stamped.size() == 1);
  CHECK(stamped[0].kind == TOMessage::Kind::Stamped);
  CHECK(stamped[0].gseq == 1);
  CHECK(logs[1] == std::vector<std::pair<uint64_t, int>>{{1, 2}});

  // sequencer's own submission stamps itself
  std::vector<TOMessage> own = nodes[1]->submit(payload(1, 0));
  REQUIRE(own.size() == 1);
  CHECK(own[0].gseq == 2);
  CHECK(nodes[1]->delivered_through() == 2);

  // a follower delivers stamps only in order
  nodes[3]->receive(own[0]);  // gseq 2 arrives first, held back
  CHECK(logs[3].empty());
  CHECK(nodes[3]->pending() == 1);
  nodes[3]->receive(stamped[0]);
  CHECK(logs[3] == std::vector<std::pair<uint64_t, int>>{{1, 2}, {2, 1}});
  CHECK(nodes[3]->delivered_through() == 2);

  CHECK_THROWS_AS(nodes[3]->receive(stamped[0]), DuplicateMessage);
}

TEST_CASE("total order delivery matches on every node under shuffling") {
  Rng rng(7);
  for (int round = 0; round < 30; ++round) {
    const int n = 2 + static_cast<int>(rng.pick(3));
    std::vector<std::vector<std::pair<uint64_t, int>>> logs(n + 1);
    std::vector<std::unique_ptr<TotalOrderNode>> nodes(n + 1);
    for (int pid = 1; pid <= n; ++pid) {
      nodes[pid] = std::make_unique<TotalOrderNode>(
          n, pid, [&logs, pid](uint64_t gseq, const OperationPayload& p) {
            logs[pid].push_back({gseq, p.pid});
          });
    }

    std::vector<TOMessage> stamped;
    const int total = 3 + static_cast<int>(rng.pick(6));
    for (int i = 0; i < total; ++i) {
      int pid = 1 + static_cast<int>(rng.pick(n));
      std::vector<TOMessage> out = nodes[pid]->submit(payload(pid, 0));
      for (TOMessage& m : out) {
        if (m.kind == TOMessage::Kind::Stamped) {
          stamped.push_back(m);
        } else {
          std::vector<TOMessage> ans = nodes[1]->receive(m);
          stamped.insert(stamped.end(), ans.begin(), ans.end());
        }
      }
    }
    REQUIRE(stamped.size() == static_cast<size_t>(total));

    // every non-sequencer node, submitters included, needs each stamped copy
    for (int dst = 2; dst <= n; ++dst) {
      std::vector<TOMessage> mix = stamped;
      for (size_t i = mix.size(); i > 1; --i)
        std::swap(mix[i - 1], mix[rng.pick(i)]);
      for (const TOMessage& m : mix) nodes[dst]->receive(m);
    }

    for (int dst = 1; dst <= n; ++dst) {
      CAPTURE(round);
      CHECK(logs[dst] == logs[1]);
      CHECK(nodes[dst]->delivered_through() == static_cast<uint64_t>(total));
    }
  }
}
