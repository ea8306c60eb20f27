#pragma once

#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fexec/errors.hpp"
#include "fexec/expr.hpp"
#include "fexec/facet.hpp"
#include "fexec/primitives.hpp"
#include "fexec/print.hpp"
#include "fexec/value.hpp"

namespace fexec {

struct EvalOptions {
  /// Test hooks that store values without consulting the program counter.
  /// They deliberately break the store meta-functions so the oracle can be
  /// shown to catch the resulting leak.
  bool raw_box_writes = false;
  bool raw_set_writes = false;
};

struct EvalResult {
  Store store;
  Value value;
};

/// Big-step faceted evaluator. One instance owns one store, one label
/// registry and one toplevel environment; evaluation state (the pc) is
/// always passed explicitly.
class Interpreter {
 public:
  using TraceSink = std::function<void(const std::string&)>;

  explicit Interpreter(EvalOptions options = {}) : options_(options), globals_(make_frame()) {}

  Interpreter(const Interpreter&) = delete;
  Interpreter& operator=(const Interpreter&) = delete;

  ~Interpreter() {
    // Closures stored in the toplevel frame capture the frame itself.
    if (globals_) globals_->bindings.clear();
  }

  void set_trace(TraceSink sink) { trace_ = std::move(sink); }
  void set_output(std::ostream* out) { out_ = out; }

  const EnvPtr& globals() const { return globals_; }
  Store& store() { return store_; }
  const Store& store() const { return store_; }

  /// Runs every toplevel form with an empty pc; returns the values of the
  /// bare expressions in order.
  std::vector<Value> run(const Program& program) {
    std::vector<Value> out;
    for (const auto& form : program.forms)
      if (auto v = run_form(form)) out.push_back(*v);
    return out;
  }

  /// Evaluates one toplevel form. Definitions yield no value.
  std::optional<Value> run_form(const TopLevel& form) {
    Value v = eval(*form.expr, globals_, PC{});
    if (form.name) {
      globals_->bindings[*form.name] = v;
      return std::nullopt;
    }
    return v;
  }

  /// e, ρ, σ ⇓ pc  σ', v  with σ the interpreter's store.
  Value eval(const Expr& e, const EnvPtr& env, const PC& pc) {
    try {
      return std::visit([&](const auto& node) { return eval_node(node, e, env, pc); }, e.node);
    } catch (Error& err) {
      err.attach(e.loc);
      throw;
    }
  }

  /// Store-passing form of eval: runs against `store` and hands it back.
  EvalResult evaluate(const Expr& e, const EnvPtr& env, Store store, const PC& pc) {
    std::swap(store_, store);
    Value v;
    try {
      v = eval(e, env, pc);
    } catch (...) {
      std::swap(store_, store);
      throw;
    }
    std::swap(store_, store);
    return {std::move(store), std::move(v)};
  }

  /// (fn args...) ⇓A pc.
  Value apply(const Value& fn, const std::vector<Value>& args, const PC& pc) {
    switch (fn.kind()) {
      case Kind::Star:
        return traced("App-Star", pc, Value::star());
      case Kind::Facet: {
        const LabelId& l = fn.facet_label();
        if (pc.has_positive(l)) return traced("App-Facet-Pos", pc, apply(fn.left(), args, pc));
        if (pc.has_negative(l)) return traced("App-Facet-Neg", pc, apply(fn.right(), args, pc));
        Value pos = apply(fn.left(), args, pc.extend(Branch::pos(l)));
        Value neg = apply(fn.right(), args, pc.extend(Branch::neg(l)));
        return traced("App-Split", pc, mkfacet(l, pos, neg));
      }
      case Kind::Closure: {
        const Closure& c = fn.as_closure();
        if (c.params.size() != args.size())
          throw ArityError(print(fn) + ": expected " + std::to_string(c.params.size()) + " argument(s), got " +
                           std::to_string(args.size()));
        EnvPtr frame = make_frame(c.env);
        for (std::size_t i = 0; i < args.size(); ++i) frame->bindings[c.params[i]] = args[i];
        return traced("App-Base", pc, eval(*c.body, frame, pc));
      }
      case Kind::Primitive:
        return lift_primitive(fn.primitive_name(), args, pc);
      default:
        throw TypeError("cannot apply non-procedure " + print(fn));
    }
  }

  /// Applies a host primitive, distributing it over faceted arguments.
  Value lift_primitive(const std::string& name, const std::vector<Value>& args, const PC& pc) {
    if (name == "display") {
      detail::expect_count(name, args, 1, 1);
      if (!pc.empty()) throw FacetEscape("display under privileged context " + pc.str());
      if (args[0].is_facet()) throw FacetEscape("display of faceted value");
      if (args[0].is_star()) throw StarObserved("display of #star");
      if (out_) *out_ << display_text(args[0]);
      return traced("App-Prim", pc, Value::void_value());
    }
    if (name == "error") {
      std::vector<Value> shown;
      for (const auto& a : args) shown.push_back(a.is_facet() ? Value::string("#<faceted>") : a);
      throw UserError(error_message(shown));
    }
    return traced("App-Prim", pc, lift_pure(name, args, pc));
  }

  /// Label registry: policy address for a label.
  Address policy_address(const LabelId& l) const {
    auto it = policies_.find(l.ordinal);
    if (it == policies_.end()) throw TypeError("unknown label " + l.name);
    return it->second;
  }

  std::uint64_t labels_created() const { return next_ordinal_ - 1; }

 private:
  Value traced(const char* rule, const PC& pc, Value v) {
    if (trace_) trace_(std::string(rule) + " " + pc.str() + " " + print(v));
    return v;
  }

  Value lift_pure(const std::string& name, const std::vector<Value>& args, const PC& pc) {
    const LabelId* split = nullptr;
    for (const auto& a : args) {
      if (a.is_star()) return Value::star();
      if (a.is_facet() && (!split || a.facet_label() < *split)) split = &a.facet_label();
    }
    if (!split) return apply_pure_primitive(name, args);

    LabelId l = *split;
    auto select = [&](bool positive) {
      std::vector<Value> out;
      out.reserve(args.size());
      for (const auto& a : args)
        out.push_back(a.is_facet() && a.facet_label() == l ? (positive ? a.left() : a.right()) : a);
      return out;
    };
    if (pc.has_positive(l)) return lift_pure(name, select(true), pc);
    if (pc.has_negative(l)) return lift_pure(name, select(false), pc);
    Value pos = lift_pure(name, select(true), pc.extend(Branch::pos(l)));
    Value neg = lift_pure(name, select(false), pc.extend(Branch::neg(l)));
    return mkfacet(l, pos, neg);
  }

  const LabelId& expect_label(const Value& v, const char* form) {
    if (!v.is(Kind::Label)) throw TypeError(std::string(form) + ": expected a label, got " + print(v));
    return v.as_label();
  }

  Value eval_node(const Expr::Const& n, const Expr&, const EnvPtr&, const PC& pc) {
    return traced("Const", pc, n.value);
  }

  Value eval_node(const Expr::Var& n, const Expr& e, const EnvPtr& env, const PC& pc) {
    return traced("Var", pc, lookup(env, n.name, e.loc));
  }

  Value eval_node(const Expr::PrimRef& n, const Expr&, const EnvPtr&, const PC& pc) {
    return traced("Var", pc, Value::primitive(n.name));
  }

  Value eval_node(const Expr::StarLit&, const Expr&, const EnvPtr&, const PC& pc) {
    return traced("Const", pc, Value::star());
  }

  Value eval_node(const Expr::Lambda& n, const Expr&, const EnvPtr& env, const PC& pc) {
    return traced("Lambda", pc, Value::closure(Closure{n.params, n.body, env, n.name}));
  }

  Value eval_node(const Expr::Apply& n, const Expr&, const EnvPtr& env, const PC& pc) {
    Value fn = eval(*n.fn, env, pc);
    std::vector<Value> args;
    args.reserve(n.args.size());
    for (const auto& a : n.args) args.push_back(eval(*a, env, pc));
    return traced("Apply", pc, apply(fn, args, pc));
  }

  Value eval_node(const Expr::Box& n, const Expr&, const EnvPtr& env, const PC& pc) {
    Value v = eval(*n.init, env, pc);
    Value cell = options_.raw_box_writes ? v : construct_facet(pc, v, Value::star());
    return traced("Box", pc, Value::address(store_.allocate(std::move(cell))));
  }

  Value eval_node(const Expr::Unbox& n, const Expr&, const EnvPtr& env, const PC& pc) {
    Value target = eval(*n.target, env, pc);
    return traced("Unbox", pc, store_read(store_, target, pc));
  }

  Value eval_node(const Expr::SetBang& n, const Expr&, const EnvPtr& env, const PC& pc) {
    Value target = eval(*n.target, env, pc);
    Value v = eval(*n.value, env, pc);
    if (options_.raw_set_writes) {
      raw_write(target, v);
    } else {
      store_write_in_place(store_, target, pc, v);
    }
    return traced("Set", pc, v);
  }

  void raw_write(const Value& target, const Value& v) {
    if (target.is(Kind::Address)) return store_.put(target.as_address(), v);
    if (target.is_facet()) {
      raw_write(target.left(), v);
      raw_write(target.right(), v);
      return;
    }
    if (!target.is_star()) throw TypeError("set!: expected a box, got " + print(target));
  }

  Value eval_node(const Expr::LetLabel& n, const Expr&, const EnvPtr& env, const PC& pc) {
    Value policy = eval(*n.policy, env, pc);
    if (!policy.is(Kind::Closure))
      throw TypeError("let-label: policy must be a procedure, got " + print(policy));
    Address where = store_.allocate(policy);
    LabelId id{next_ordinal_++, n.name, n.site};
    policies_[id.ordinal] = where;
    EnvPtr inner = make_frame(env);
    inner->bindings[n.name] = Value::label(id);
    return traced("Let-Label", pc, eval(*n.body, inner, pc));
  }

  Value eval_node(const Expr::FacetCreate& n, const Expr&, const EnvPtr& env, const PC& pc) {
    LabelId l = expect_label(eval(*n.label, env, pc), "facet");
    if (pc.has_positive(l)) return traced("Fac-Create-Pos", pc, eval(*n.pos, env, pc));
    if (pc.has_negative(l)) return traced("Fac-Create-Neg", pc, eval(*n.neg, env, pc));
    PC positive = pc.extend(Branch::pos(l));
    Value v1 = eval(*n.pos, env, positive);
    Value v2 = eval(*n.neg, env, pc.extend(Branch::neg(l)));
    return traced("Fac-Create-Split", pc, construct_facet(positive, v1, v2));
  }

  Value eval_node(const Expr::Obs& n, const Expr&, const EnvPtr& env, const PC& pc) {
    LabelId l = expect_label(eval(*n.label, env, pc), "obs");
    Value key = eval(*n.key, env, pc);
    Value policy = store_.at(policy_address(l));
    Value decision = apply(policy, {key}, pc);
    if (decision.is_facet() || decision.is_star())
      throw PolicyError("policy of " + l.name + " returned " + print(decision) + " for key " + print(key));
    Value v = eval(*n.fac, env, pc);
    return traced("Obs", pc, obs_project(l, v, decision.truthy()));
  }

  Value eval_node(const Expr::If& n, const Expr&, const EnvPtr& env, const PC& pc) {
    Value c = eval(*n.cond, env, pc);
    return branch_on(c, n, env, pc);
  }

  Value branch_on(const Value& c, const Expr::If& n, const EnvPtr& env, const PC& pc) {
    if (c.is_star()) return traced("If-Star", pc, Value::star());
    if (!c.is_facet()) return traced("If", pc, eval(c.truthy() ? *n.then : *n.otherwise, env, pc));
    const LabelId& l = c.facet_label();
    if (pc.has_positive(l)) return traced("If-Pos", pc, branch_on(c.left(), n, env, pc));
    if (pc.has_negative(l)) return traced("If-Neg", pc, branch_on(c.right(), n, env, pc));
    Value pos = branch_on(c.left(), n, env, pc.extend(Branch::pos(l)));
    Value neg = branch_on(c.right(), n, env, pc.extend(Branch::neg(l)));
    return traced("If-Split", pc, mkfacet(l, pos, neg));
  }

  Value eval_node(const Expr::Begin& n, const Expr&, const EnvPtr& env, const PC& pc) {
    Value last = Value::void_value();
    for (const auto& x : n.body) last = eval(*x, env, pc);
    return traced("Begin", pc, last);
  }

  Value eval_node(const Expr::ObsSelect&, const Expr&, const EnvPtr&, const PC&) {
    throw TypeError("obs-select is only meaningful to the standard evaluator");
  }

  EvalOptions options_;
  Store store_;
  EnvPtr globals_;
  std::unordered_map<std::uint64_t, Address> policies_;
  std::uint64_t next_ordinal_ = 1;
  TraceSink trace_;
  std::ostream* out_ = &std::cout;
};

}  // namespace fexec
