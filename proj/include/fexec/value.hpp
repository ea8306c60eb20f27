#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "fexec/errors.hpp"

namespace fexec {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Runtime identity of a label. Ordinals are handed out in creation order and
/// define the canonical order of facet trees.
struct LabelId {
  std::uint64_t ordinal = 0;
  std::string name;
  /// Parser-assigned id of the `let-label` form that minted this label.
  std::uint32_t site = 0;

  friend bool operator==(const LabelId& a, const LabelId& b) { return a.ordinal == b.ordinal; }
  friend auto operator<=>(const LabelId& a, const LabelId& b) { return a.ordinal <=> b.ordinal; }
};

using Address = std::uint64_t;

class Value;
struct Frame;
using EnvPtr = std::shared_ptr<Frame>;

enum class Kind { Int, Bool, String, Nil, Pair, Closure, Primitive, Address, Star, Facet, Label, Void };

struct Closure {
  std::vector<std::string> params;
  ExprPtr body;
  EnvPtr env;
  std::string name;
};

/// Immutable, shared value. Facet nodes are always kept canonical by the
/// constructors in facet.hpp; `Value::facet` itself does not reorder.
class Value {
 public:
  struct PairNode;
  struct FacetNode;

  Value() : Value(nil()) {}

  static Value integer(std::int64_t n) { return Value(Node{n}); }
  static Value boolean(bool b) { return b ? true_value() : false_value(); }
  static Value string(std::string s) { return Value(Node{Str{std::move(s)}}); }
  static Value nil() {
    static const Value v{Node{Nil{}}};
    return v;
  }
  static Value star() {
    static const Value v{Node{Star{}}};
    return v;
  }
  /// Result of effect-only primitives such as `display`.
  static Value void_value() {
    static const Value v{Node{Void{}}};
    return v;
  }
  static Value pair(Value car, Value cdr);
  static Value closure(Closure c) { return Value(Node{std::make_shared<const Closure>(std::move(c))}); }
  static Value primitive(std::string name) { return Value(Node{Prim{std::move(name)}}); }
  static Value address(Address a) { return Value(Node{Addr{a}}); }
  static Value label(LabelId id) { return Value(Node{std::move(id)}); }
  /// Raw facet node. Use mkfacet() to preserve canonical form.
  static Value facet(LabelId label, Value left, Value right);

  Kind kind() const { return static_cast<Kind>(node_->data.index()); }
  bool is(Kind k) const { return kind() == k; }
  bool is_facet() const { return is(Kind::Facet); }
  bool is_star() const { return is(Kind::Star); }

  std::int64_t as_int() const { return std::get<std::int64_t>(node_->data); }
  bool as_bool() const { return std::get<bool>(node_->data); }
  const std::string& as_string() const { return std::get<Str>(node_->data).text; }
  const Value& car() const;
  const Value& cdr() const;
  const Closure& as_closure() const { return *std::get<std::shared_ptr<const Closure>>(node_->data); }
  const std::string& primitive_name() const { return std::get<Prim>(node_->data).name; }
  Address as_address() const { return std::get<Addr>(node_->data).addr; }
  const LabelId& as_label() const { return std::get<LabelId>(node_->data); }

  const LabelId& facet_label() const;
  const Value& left() const;
  const Value& right() const;

  /// Scheme truthiness: everything except `false` is true.
  bool truthy() const { return !(is(Kind::Bool) && !as_bool()); }

  /// Node identity, used for closures and cheap equality short-cuts.
  const void* identity() const { return node_.get(); }

 private:
  struct Str {
    std::string text;
  };
  struct Nil {};
  struct Star {};
  struct Void {};
  struct Prim {
    std::string name;
  };
  struct Addr {
    Address addr;
  };
  // Alternative order must match Kind.
  using Data = std::variant<std::int64_t, bool, Str, Nil, std::shared_ptr<const PairNode>,
                            std::shared_ptr<const Closure>, Prim, Addr, Star,
                            std::shared_ptr<const FacetNode>, LabelId, Void>;
  struct Node {
    Data data;
  };

  explicit Value(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

  static Value true_value() {
    static const Value v{Node{true}};
    return v;
  }
  static Value false_value() {
    static const Value v{Node{false}};
    return v;
  }

  std::shared_ptr<const Node> node_;
};

struct Value::PairNode {
  Value car;
  Value cdr;
};

struct Value::FacetNode {
  LabelId label;
  Value left;
  Value right;
};

inline Value Value::pair(Value car, Value cdr) {
  return Value(Node{std::make_shared<const PairNode>(PairNode{std::move(car), std::move(cdr)})});
}

inline Value Value::facet(LabelId label, Value left, Value right) {
  return Value(Node{std::make_shared<const FacetNode>(
      FacetNode{std::move(label), std::move(left), std::move(right)})});
}

inline const Value& Value::car() const { return std::get<std::shared_ptr<const PairNode>>(node_->data)->car; }
inline const Value& Value::cdr() const { return std::get<std::shared_ptr<const PairNode>>(node_->data)->cdr; }
inline const LabelId& Value::facet_label() const {
  return std::get<std::shared_ptr<const FacetNode>>(node_->data)->label;
}
inline const Value& Value::left() const { return std::get<std::shared_ptr<const FacetNode>>(node_->data)->left; }
inline const Value& Value::right() const { return std::get<std::shared_ptr<const FacetNode>>(node_->data)->right; }

inline Value make_list(const std::vector<Value>& items) {
  Value out = Value::nil();
  for (auto it = items.rbegin(); it != items.rend(); ++it) out = Value::pair(*it, out);
  return out;
}

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Int: return "integer";
    case Kind::Bool: return "boolean";
    case Kind::String: return "string";
    case Kind::Nil: return "empty list";
    case Kind::Pair: return "pair";
    case Kind::Closure: return "procedure";
    case Kind::Primitive: return "primitive";
    case Kind::Address: return "box";
    case Kind::Star: return "star";
    case Kind::Facet: return "facet";
    case Kind::Label: return "label";
    case Kind::Void: return "void";
  }
  return "?";
}

/// Structural equality. Closures compare by identity; labels by ordinal.
inline bool same_value(const Value& a, const Value& b) {
  if (a.identity() == b.identity()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::Int: return a.as_int() == b.as_int();
    case Kind::Bool: return a.as_bool() == b.as_bool();
    case Kind::String: return a.as_string() == b.as_string();
    case Kind::Nil:
    case Kind::Star:
    case Kind::Void: return true;
    case Kind::Pair: return same_value(a.car(), b.car()) && same_value(a.cdr(), b.cdr());
    case Kind::Closure: return &a.as_closure() == &b.as_closure();
    case Kind::Primitive: return a.primitive_name() == b.primitive_name();
    case Kind::Address: return a.as_address() == b.as_address();
    case Kind::Label: return a.as_label() == b.as_label();
    case Kind::Facet:
      return a.facet_label() == b.facet_label() && same_value(a.left(), b.left()) &&
             same_value(a.right(), b.right());
  }
  return false;
}

// ---------------------------------------------------------------------------
// Environments

/// One lexical frame. The toplevel frame is mutated as definitions arrive so
/// that defined functions can refer to themselves and to later definitions.
struct Frame {
  std::unordered_map<std::string, Value> bindings;
  EnvPtr parent;

  const Value* find(const std::string& name) const {
    for (const Frame* f = this; f; f = f->parent.get()) {
      if (auto it = f->bindings.find(name); it != f->bindings.end()) return &it->second;
    }
    return nullptr;
  }
};

inline EnvPtr make_frame(EnvPtr parent = nullptr) {
  auto f = std::make_shared<Frame>();
  f->parent = std::move(parent);
  return f;
}

inline const Value& lookup(const EnvPtr& env, const std::string& name, SourceLoc loc = {}) {
  const Value* v = env ? env->find(name) : nullptr;
  if (!v) throw UnboundVariable(name, loc);
  return *v;
}

}  // namespace fexec
