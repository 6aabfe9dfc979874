#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <variant>

#include <json.hpp>

#include "ccobj/errors.hpp"

namespace ccobj {

/// Distinguished return values shared by all object specifications.
/// `Bottom` is the empty-stack/queue marker, `Done` acknowledges updates,
/// `Top` marks a rejected push on a full bounded stack.
enum class Symbol : uint8_t { Bottom = 0, Done = 1, Top = 2 };

inline const char* symbol_name(Symbol s) {
  switch (s) {
    case Symbol::Bottom: return "bot";
    case Symbol::Done: return "done";
    case Symbol::Top: return "top";
  }
  return "?";
}

/// A value in the single tagged universe used for operation arguments,
/// returns, and register contents: integers, short strings, and the
/// distinguished symbols.
class Value {
 public:
  Value() : rep_(int64_t{0}) {}
  Value(int64_t v) : rep_(v) {}
  Value(int v) : rep_(int64_t{v}) {}
  Value(std::string v) : rep_(std::move(v)) {}
  Value(const char* v) : rep_(std::string(v)) {}
  Value(Symbol s) : rep_(s) {}

  static Value bottom() { return Value(Symbol::Bottom); }
  static Value done() { return Value(Symbol::Done); }
  static Value top() { return Value(Symbol::Top); }

  bool is_int() const { return std::holds_alternative<int64_t>(rep_); }
  bool is_str() const { return std::holds_alternative<std::string>(rep_); }
  bool is_sym() const { return std::holds_alternative<Symbol>(rep_); }
  bool is_sym(Symbol s) const { return is_sym() && std::get<Symbol>(rep_) == s; }

  int64_t as_int() const {
    if (!is_int()) throw DomainError("value is not an integer: " + encode());
    return std::get<int64_t>(rep_);
  }
  const std::string& as_str() const {
    if (!is_str()) throw DomainError("value is not a string: " + encode());
    return std::get<std::string>(rep_);
  }

  /// Canonical byte representation; distinct values encode distinctly.
  std::string encode() const {
    if (is_int()) return "i:" + std::to_string(std::get<int64_t>(rep_));
    if (is_str()) return "s:" + std::get<std::string>(rep_);
    return std::string("y:") + symbol_name(std::get<Symbol>(rep_));
  }

  friend bool operator==(const Value&, const Value&) = default;
  friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (auto c = a.rep_.index() <=> b.rep_.index(); c != 0) return c;
    if (a.is_int()) return std::get<int64_t>(a.rep_) <=> std::get<int64_t>(b.rep_);
    if (a.is_str()) return std::get<std::string>(a.rep_) <=> std::get<std::string>(b.rep_);
    return std::get<Symbol>(a.rep_) <=> std::get<Symbol>(b.rep_);
  }

  /// JSON mapping: integers and strings map to the native JSON types,
  /// symbols map to {"sym": "bot"|"done"|"top"}.
  nlohmann::json to_json() const {
    if (is_int()) return std::get<int64_t>(rep_);
    if (is_str()) return std::get<std::string>(rep_);
    return nlohmann::json{{"sym", symbol_name(std::get<Symbol>(rep_))}};
  }

  static Value from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Value(j.get<int64_t>());
    if (j.is_string()) return Value(j.get<std::string>());
    if (j.is_object() && j.contains("sym")) {
      const std::string s = j.at("sym").get<std::string>();
      if (s == "bot") return bottom();
      if (s == "done") return done();
      if (s == "top") return top();
      throw ParseError("unknown symbol name: " + s);
    }
    throw ParseError("cannot parse value: " + j.dump());
  }

 private:
  std::variant<int64_t, std::string, Symbol> rep_;
};

}  // namespace ccobj
