#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ccobj {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// objects
struct UnknownOperation : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };

// history
struct AmbiguousWrite : Error { using Error::Error; };
struct DanglingRead : Error { using Error::Error; };

struct CyclicOrder : Error {
  explicit CyclicOrder(std::vector<std::string> cycle_ids)
      : Error("cyclic order: " + join(cycle_ids)), cycle(std::move(cycle_ids)) {}
  std::vector<std::string> cycle;

 private:
  static std::string join(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
      if (!out.empty()) out += " -> ";
      out += id;
    }
    return out;
  }
};

// checker
struct SizeLimit : Error { using Error::Error; };
struct MissingTimestamps : Error { using Error::Error; };

// broadcast / runtime / sim
struct DuplicateMessage : Error { using Error::Error; };
struct UnknownObject : Error { using Error::Error; };
struct CrashedReplica : Error { using Error::Error; };
struct ScheduleDeadlock : Error { using Error::Error; };

// malformed inputs (scenario/trace files)
struct ParseError : Error { using Error::Error; };

}  // namespace ccobj
