#pragma once

#include <sstream>
#include <string>

#include "fexec/value.hpp"

namespace fexec {

namespace detail {

inline void write_string_literal(std::ostream& out, const std::string& s) {
  out << '"';
  for (char c : s) {
    switch (c) {
      case '"': out << "\\\""; break;
      case '\\': out << "\\\\"; break;
      case '\n': out << "\\n"; break;
      case '\t': out << "\\t"; break;
      default: out << c;
    }
  }
  out << '"';
}

inline void write_value(std::ostream& out, const Value& v, bool nested) {
  switch (v.kind()) {
    case Kind::Int: out << v.as_int(); break;
    case Kind::Bool: out << (v.as_bool() ? "true" : "false"); break;
    case Kind::String: write_string_literal(out, v.as_string()); break;
    case Kind::Nil: out << (nested ? "()" : "'()"); break;
    case Kind::Pair: {
      out << '(';
      write_value(out, v.car(), true);
      Value rest = v.cdr();
      while (rest.is(Kind::Pair)) {
        out << ' ';
        write_value(out, rest.car(), true);
        rest = rest.cdr();
      }
      if (!rest.is(Kind::Nil)) {
        out << " . ";
        write_value(out, rest, true);
      }
      out << ')';
      break;
    }
    case Kind::Closure: {
      const auto& name = v.as_closure().name;
      out << "#proc:" << (name.empty() ? "lambda" : name);
      break;
    }
    case Kind::Primitive: out << "#proc:" << v.primitive_name(); break;
    case Kind::Address: out << "#box"; break;
    case Kind::Star: out << "#star"; break;
    case Kind::Void: out << "#void"; break;
    case Kind::Label: out << "#label:" << v.as_label().name; break;
    case Kind::Facet:
      out << "#facet<" << v.facet_label().name << " ? ";
      write_value(out, v.left(), false);
      out << " : ";
      write_value(out, v.right(), false);
      out << '>';
      break;
  }
}

}  // namespace detail

/// Renders a value in the interpreter's external format, e.g.
/// `#facet<l ? (1 . 2) : '()>`.
inline std::string print(const Value& v) {
  std::ostringstream out;
  detail::write_value(out, v, false);
  return out.str();
}

inline std::ostream& operator<<(std::ostream& out, const Value& v) {
  detail::write_value(out, v, false);
  return out;
}

/// Text emitted by `display`: strings raw, everything else as printed.
inline std::string display_text(const Value& v) {
  if (v.is(Kind::String)) return v.as_string();
  return print(v);
}

}  // namespace fexec
