#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fexec/errors.hpp"
#include "fexec/print.hpp"
#include "fexec/value.hpp"

namespace fexec {

/// Abstract syntax of the core language. Surface sugar (`let`, `let*`,
/// `and`, `or`, multi-form bodies) is gone by the time an Expr exists.
struct Expr {
  struct Const {
    Value value;
  };
  struct Var {
    std::string name;
  };
  struct Lambda {
    std::vector<std::string> params;
    ExprPtr body;
    /// Name of the definition this lambda was bound to, for printing only.
    std::string name;
  };
  struct Apply {
    ExprPtr fn;
    std::vector<ExprPtr> args;
  };
  struct Box {
    ExprPtr init;
  };
  struct Unbox {
    ExprPtr target;
  };
  struct SetBang {
    ExprPtr target;
    ExprPtr value;
  };
  struct LetLabel {
    std::string name;
    ExprPtr policy;
    ExprPtr body;
    /// Unique per program; identifies the binder statically.
    std::uint32_t site = 0;
  };
  struct FacetCreate {
    ExprPtr label;
    ExprPtr pos;
    ExprPtr neg;
  };
  struct Obs {
    ExprPtr label;
    ExprPtr key;
    ExprPtr fac;
  };
  struct If {
    ExprPtr cond;
    ExprPtr then;
    ExprPtr otherwise;
  };
  struct Begin {
    std::vector<ExprPtr> body;
  };
  struct PrimRef {
    std::string name;
  };
  struct StarLit {};
  /// Only produced by program projection (oracle.hpp): an `obs` whose
  /// value may have to come from another secure-multi-execution copy.
  /// `id` numbers the obs forms of the source program.
  struct ObsSelect {
    ExprPtr label;
    ExprPtr key;
    ExprPtr fac;
    std::uint32_t id = 0;
  };

  using Node = std::variant<Const, Var, Lambda, Apply, Box, Unbox, SetBang, LetLabel, FacetCreate, Obs,
                            If, Begin, PrimRef, StarLit, ObsSelect>;

  Node node;
  SourceLoc loc;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

/// One toplevel form: a definition (`name` set) or a bare expression.
struct TopLevel {
  std::optional<std::string> name;
  ExprPtr expr;
  SourceLoc loc;
};

struct Program {
  std::vector<TopLevel> forms;
};

template <class T>
ExprPtr make_expr(T node, SourceLoc loc = {}) {
  return std::make_shared<const Expr>(Expr{Expr::Node{std::move(node)}, loc});
}

// ---------------------------------------------------------------------------
// Structural equality (ignores source locations, binder sites and the
// printing-only lambda name).

bool same_expr(const Expr& a, const Expr& b);

inline bool same_expr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return a == b;
  return same_expr(*a, *b);
}

inline bool same_exprs(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_expr(a[i], b[i])) return false;
  return true;
}

inline bool same_expr(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Expr::Const>) return same_value(x.value, y.value);
        else if constexpr (std::is_same_v<T, Expr::Var> || std::is_same_v<T, Expr::PrimRef>)
          return x.name == y.name;
        else if constexpr (std::is_same_v<T, Expr::Lambda>)
          return x.params == y.params && same_expr(x.body, y.body);
        else if constexpr (std::is_same_v<T, Expr::Apply>)
          return same_expr(x.fn, y.fn) && same_exprs(x.args, y.args);
        else if constexpr (std::is_same_v<T, Expr::Box>) return same_expr(x.init, y.init);
        else if constexpr (std::is_same_v<T, Expr::Unbox>) return same_expr(x.target, y.target);
        else if constexpr (std::is_same_v<T, Expr::SetBang>)
          return same_expr(x.target, y.target) && same_expr(x.value, y.value);
        else if constexpr (std::is_same_v<T, Expr::LetLabel>)
          return x.name == y.name && same_expr(x.policy, y.policy) && same_expr(x.body, y.body);
        else if constexpr (std::is_same_v<T, Expr::FacetCreate>)
          return same_expr(x.label, y.label) && same_expr(x.pos, y.pos) && same_expr(x.neg, y.neg);
        else if constexpr (std::is_same_v<T, Expr::Obs>)
          return same_expr(x.label, y.label) && same_expr(x.key, y.key) && same_expr(x.fac, y.fac);
        else if constexpr (std::is_same_v<T, Expr::If>)
          return same_expr(x.cond, y.cond) && same_expr(x.then, y.then) &&
                 same_expr(x.otherwise, y.otherwise);
        else if constexpr (std::is_same_v<T, Expr::Begin>) return same_exprs(x.body, y.body);
        else if constexpr (std::is_same_v<T, Expr::StarLit>) return true;
        else
          return x.id == y.id && same_expr(x.label, y.label) && same_expr(x.key, y.key) && same_expr(x.fac, y.fac);
      },
      a.node);
}

inline bool same_program(const Program& a, const Program& b) {
  if (a.forms.size() != b.forms.size()) return false;
  for (std::size_t i = 0; i < a.forms.size(); ++i) {
    if (a.forms[i].name != b.forms[i].name) return false;
    if (!same_expr(a.forms[i].expr, b.forms[i].expr)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Source printing. The output reparses to a structurally identical tree.

namespace detail {

inline void write_const(std::ostream& out, const Value& v) {
  switch (v.kind()) {
    case Kind::Nil: out << "'()"; break;
    case Kind::Pair: out << '\'' << print(v); break;
    default: out << print(v);
  }
}

inline void write_expr(std::ostream& out, const Expr& e);

inline void write_seq(std::ostream& out, const std::vector<ExprPtr>& es) {
  for (const auto& x : es) {
    out << ' ';
    write_expr(out, *x);
  }
}

inline void write_expr(std::ostream& out, const Expr& e) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::Const>) write_const(out, x.value);
        else if constexpr (std::is_same_v<T, Expr::Var> || std::is_same_v<T, Expr::PrimRef>)
          out << x.name;
        else if constexpr (std::is_same_v<T, Expr::Lambda>) {
          out << "(lambda (";
          for (std::size_t i = 0; i < x.params.size(); ++i) out << (i ? " " : "") << x.params[i];
          out << ") ";
          write_expr(out, *x.body);
          out << ')';
        } else if constexpr (std::is_same_v<T, Expr::Apply>) {
          out << '(';
          write_expr(out, *x.fn);
          write_seq(out, x.args);
          out << ')';
        } else if constexpr (std::is_same_v<T, Expr::Box>) {
          out << "(box ";
          write_expr(out, *x.init);
          out << ')';
        } else if constexpr (std::is_same_v<T, Expr::Unbox>) {
          out << "(unbox ";
          write_expr(out, *x.target);
          out << ')';
        } else if constexpr (std::is_same_v<T, Expr::SetBang>) {
          out << "(set! ";
          write_expr(out, *x.target);
          out << ' ';
          write_expr(out, *x.value);
          out << ')';
        } else if constexpr (std::is_same_v<T, Expr::LetLabel>) {
          out << "(let-label " << x.name << ' ';
          write_expr(out, *x.policy);
          out << ' ';
          write_expr(out, *x.body);
          out << ')';
        } else if constexpr (std::is_same_v<T, Expr::FacetCreate>) {
          out << "(facet";
          write_seq(out, {x.label, x.pos, x.neg});
          out << ')';
        } else if constexpr (std::is_same_v<T, Expr::Obs>) {
          out << "(obs";
          write_seq(out, {x.label, x.key, x.fac});
          out << ')';
        } else if constexpr (std::is_same_v<T, Expr::If>) {
          out << "(if";
          write_seq(out, {x.cond, x.then, x.otherwise});
          out << ')';
        } else if constexpr (std::is_same_v<T, Expr::Begin>) {
          out << "(begin";
          write_seq(out, x.body);
          out << ')';
        } else if constexpr (std::is_same_v<T, Expr::StarLit>) {
          out << "(star)";
        } else {
          out << "(obs-select " << x.id;
          write_seq(out, {x.label, x.key, x.fac});
          out << ')';
        }
      },
      e.node);
}

}  // namespace detail

inline std::string to_source(const Expr& e) {
  std::ostringstream out;
  detail::write_expr(out, e);
  return out.str();
}

inline std::string to_source(const Program& p) {
  std::ostringstream out;
  for (const auto& form : p.forms) {
    if (form.name) {
      out << "(define " << *form.name << ' ';
      detail::write_expr(out, *form.expr);
      out << ")\n";
    } else {
      detail::write_expr(out, *form.expr);
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace fexec
