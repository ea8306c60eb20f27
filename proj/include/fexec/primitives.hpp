#pragma once

#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "fexec/errors.hpp"
#include "fexec/print.hpp"
#include "fexec/value.hpp"

namespace fexec {

/// `display` and `error` have effects; every other primitive is a pure
/// function of unfaceted, non-star arguments.
inline bool is_effectful_primitive(std::string_view name) { return name == "display" || name == "error"; }

namespace detail {

inline void expect_count(std::string_view name, std::span<const Value> args, std::size_t lo,
                         std::size_t hi = std::numeric_limits<std::size_t>::max()) {
  if (args.size() < lo || args.size() > hi) {
    std::string want = lo == hi ? std::to_string(lo) : hi == std::numeric_limits<std::size_t>::max()
                                                           ? "at least " + std::to_string(lo)
                                                           : std::to_string(lo) + ".." + std::to_string(hi);
    throw ArityError(std::string(name) + ": expected " + want + " argument(s), got " + std::to_string(args.size()));
  }
}

inline std::int64_t expect_int(std::string_view name, const Value& v) {
  if (!v.is(Kind::Int)) throw TypeError(std::string(name) + ": expected integer, got " + print(v));
  return v.as_int();
}

inline const Value& expect_pair(std::string_view name, const Value& v) {
  if (!v.is(Kind::Pair)) throw TypeError(std::string(name) + ": expected pair, got " + print(v));
  return v;
}

}  // namespace detail

/// Applies a pure primitive to base values (no facets, no star).
inline Value apply_pure_primitive(std::string_view name, std::span<const Value> args) {
  using detail::expect_count;
  using detail::expect_int;
  if (name == "cons") {
    expect_count(name, args, 2, 2);
    return Value::pair(args[0], args[1]);
  }
  if (name == "car") {
    expect_count(name, args, 1, 1);
    return detail::expect_pair(name, args[0]).car();
  }
  if (name == "cdr") {
    expect_count(name, args, 1, 1);
    return detail::expect_pair(name, args[0]).cdr();
  }
  if (name == "null?") {
    expect_count(name, args, 1, 1);
    return Value::boolean(args[0].is(Kind::Nil));
  }
  if (name == "pair?") {
    expect_count(name, args, 1, 1);
    return Value::boolean(args[0].is(Kind::Pair));
  }
  if (name == "list") {
    return make_list(std::vector<Value>(args.begin(), args.end()));
  }
  if (name == "=") {
    expect_count(name, args, 2, 2);
    return Value::boolean(same_value(args[0], args[1]));
  }
  if (name == "<" || name == ">") {
    expect_count(name, args, 2, 2);
    auto a = expect_int(name, args[0]);
    auto b = expect_int(name, args[1]);
    return Value::boolean(name == "<" ? a < b : a > b);
  }
  if (name == "+" || name == "*") {
    std::int64_t acc = name == "+" ? 0 : 1;
    for (const auto& a : args) acc = name == "+" ? acc + expect_int(name, a) : acc * expect_int(name, a);
    return Value::integer(acc);
  }
  if (name == "-") {
    expect_count(name, args, 1);
    std::int64_t acc = expect_int(name, args[0]);
    if (args.size() == 1) return Value::integer(-acc);
    for (std::size_t i = 1; i < args.size(); ++i) acc -= expect_int(name, args[i]);
    return Value::integer(acc);
  }
  if (name == "not") {
    expect_count(name, args, 1, 1);
    return Value::boolean(!args[0].truthy());
  }
  throw TypeError("unknown primitive '" + std::string(name) + "'");
}

/// Message carried by `(error ...)`.
inline std::string error_message(std::span<const Value> args) {
  std::string msg;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) msg += ' ';
    msg += display_text(args[i]);
  }
  return msg;
}

}  // namespace fexec
