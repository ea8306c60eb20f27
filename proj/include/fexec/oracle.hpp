#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "fexec/errors.hpp"
#include "fexec/evaluator.hpp"
#include "fexec/expr.hpp"
#include "fexec/primitives.hpp"
#include "fexec/print.hpp"
#include "fexec/value.hpp"

namespace fexec {

/// One secure-multi-execution copy: a truth assignment to every label
/// binder (`let-label` site) of a program.
struct View {
  std::map<std::uint32_t, bool> sees;

  bool at(std::uint32_t site) const {
    auto it = sees.find(site);
    if (it == sees.end()) throw MissingLabel("view does not assign binder site " + std::to_string(site));
    return it->second;
  }

  View with(std::uint32_t site, bool b) const {
    View v = *this;
    v.sees[site] = b;
    return v;
  }

  std::string str(const std::map<std::uint32_t, std::string>& names = {}) const {
    std::string out = "{";
    bool first = true;
    for (const auto& [site, b] : sees) {
      if (!first) out += ',';
      first = false;
      auto it = names.find(site);
      out += (b ? "+" : "-") + (it != names.end() ? it->second : "#" + std::to_string(site));
    }
    return out + "}";
  }
};

/// Replaces every facet by the side the view selects.
inline Value project_value(const Value& v, const View& view) {
  if (!v.is_facet()) return v;
  return project_value(view.at(v.facet_label().site) ? v.left() : v.right(), view);
}

// ---------------------------------------------------------------------------
// Program projection

/// Static facts the oracle needs about a program.
struct OracleInfo {
  /// Binder sites in source order, with the binder names.
  std::vector<std::uint32_t> sites;
  std::map<std::uint32_t, std::string> names;
};

namespace detail {

/// Resolves label expressions to their `let-label` binder and rewrites
/// `facet` / `obs` for a given view. With no view it only validates.
class Projector {
 public:
  explicit Projector(const View* view) : view_(view) {}

  Program run(const Program& p) {
    // Label-valued definitions are visible to every function body, including
    // ones defined earlier in the file.
    for (const auto& form : p.forms)
      if (form.name) globals_[*form.name] = std::nullopt;
    for (const auto& form : p.forms)
      if (form.name) globals_[*form.name] = resolve(*form.expr, {});

    Program out;
    for (const auto& form : p.forms) out.forms.push_back({form.name, project(form.expr, {}, true, view_), form.loc});
    return out;
  }

  OracleInfo info() const { return info_; }

 private:
  using Scope = std::vector<std::pair<std::string, std::optional<std::uint32_t>>>;

  std::optional<std::uint32_t> lookup_site(const std::string& name, const Scope& scope) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == name) return it->second;
    if (auto it = globals_.find(name); it != globals_.end()) return it->second;
    return std::nullopt;
  }

  /// Binder site of a label-valued expression, if statically known.
  std::optional<std::uint32_t> resolve(const Expr& e, const Scope& scope) const {
    if (auto* v = e.as<Expr::Var>()) return lookup_site(v->name, scope);
    if (auto* ll = e.as<Expr::LetLabel>()) {
      Scope inner = scope;
      inner.emplace_back(ll->name, ll->site);
      return resolve(*ll->body, inner);
    }
    if (auto* b = e.as<Expr::Begin>()) return resolve(*b->body.back(), scope);
    return std::nullopt;
  }

  static bool has_store_effect(const Expr& e) {
    return std::visit(
        [](const auto& n) -> bool {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Expr::SetBang> || std::is_same_v<T, Expr::Box>) return true;
          else if constexpr (std::is_same_v<T, Expr::Lambda>) return has_store_effect(*n.body);
          else if constexpr (std::is_same_v<T, Expr::Apply>) {
            if (has_store_effect(*n.fn)) return true;
            for (const auto& a : n.args)
              if (has_store_effect(*a)) return true;
            return false;
          } else if constexpr (std::is_same_v<T, Expr::Unbox>) return has_store_effect(*n.target);
          else if constexpr (std::is_same_v<T, Expr::LetLabel>)
            return has_store_effect(*n.policy) || has_store_effect(*n.body);
          else if constexpr (std::is_same_v<T, Expr::FacetCreate>)
            return has_store_effect(*n.label) || has_store_effect(*n.pos) || has_store_effect(*n.neg);
          else if constexpr (std::is_same_v<T, Expr::Obs>)
            return has_store_effect(*n.label) || has_store_effect(*n.key) || has_store_effect(*n.fac);
          else if constexpr (std::is_same_v<T, Expr::If>)
            return has_store_effect(*n.cond) || has_store_effect(*n.then) || has_store_effect(*n.otherwise);
          else if constexpr (std::is_same_v<T, Expr::Begin>) {
            for (const auto& a : n.body)
              if (has_store_effect(*a)) return true;
            return false;
          } else return false;
        },
        e.node);
  }

  ExprPtr project(const ExprPtr& e, const Scope& scope, bool once, const View* view) {
    return std::visit([&](const auto& n) { return project_node(n, e, scope, once, view); }, e->node);
  }

  template <class T>
  ExprPtr project_node(const T&, const ExprPtr& e, const Scope&, bool, const View*) {
    return e;  // leaves: Const, Var, PrimRef, StarLit
  }

  ExprPtr project_node(const Expr::Lambda& n, const ExprPtr& e, const Scope& scope, bool, const View* view) {
    Scope inner = scope;
    for (const auto& p : n.params) inner.emplace_back(p, std::nullopt);
    return make_expr(Expr::Lambda{n.params, project(n.body, inner, false, view), n.name}, e->loc);
  }

  ExprPtr project_node(const Expr::Apply& n, const ExprPtr& e, const Scope& scope, bool once, const View* view) {
    std::vector<ExprPtr> args;
    for (const auto& a : n.args) args.push_back(project(a, scope, once, view));
    auto* lam = n.fn->as<Expr::Lambda>();
    if (lam && lam->params.size() == n.args.size()) {
      // Immediate application (desugared let): the body runs once per
      // evaluation of this form and parameters may alias labels.
      Scope inner = scope;
      for (std::size_t i = 0; i < lam->params.size(); ++i)
        inner.emplace_back(lam->params[i], resolve(*n.args[i], scope));
      ExprPtr body = project(lam->body, inner, once, view);
      return make_expr(Expr::Apply{make_expr(Expr::Lambda{lam->params, body, lam->name}, n.fn->loc), args}, e->loc);
    }
    return make_expr(Expr::Apply{project(n.fn, scope, once, view), args}, e->loc);
  }

  ExprPtr project_node(const Expr::Box& n, const ExprPtr& e, const Scope& scope, bool once, const View* view) {
    return make_expr(Expr::Box{project(n.init, scope, once, view)}, e->loc);
  }

  ExprPtr project_node(const Expr::Unbox& n, const ExprPtr& e, const Scope& scope, bool once, const View* view) {
    return make_expr(Expr::Unbox{project(n.target, scope, once, view)}, e->loc);
  }

  ExprPtr project_node(const Expr::SetBang& n, const ExprPtr& e, const Scope& scope, bool once, const View* view) {
    return make_expr(Expr::SetBang{project(n.target, scope, once, view), project(n.value, scope, once, view)},
                     e->loc);
  }

  ExprPtr project_node(const Expr::LetLabel& n, const ExprPtr& e, const Scope& scope, bool once, const View* view) {
    if (!once) throw NotOracleSafe("let-label '" + n.name + "' may run more than once (inside a function body)", e->loc);
    if (!info_.names.count(n.site)) {
      info_.sites.push_back(n.site);
      info_.names[n.site] = n.name;
    }
    Scope inner = scope;
    inner.emplace_back(n.name, n.site);
    return make_expr(Expr::LetLabel{n.name, project(n.policy, scope, once, view), project(n.body, inner, once, view),
                                    n.site},
                     e->loc);
  }

  std::uint32_t label_site(const Expr& label, const Scope& scope, const char* form) const {
    auto site = resolve(label, scope);
    if (!site)
      throw NotOracleSafe(std::string(form) + " label is not a statically known let-label binder: " + to_source(label),
                          label.loc);
    return *site;
  }

  ExprPtr project_node(const Expr::FacetCreate& n, const ExprPtr& e, const Scope& scope, bool once, const View* view) {
    std::uint32_t site = label_site(*n.label, scope, "facet");
    if (!view) {
      project(n.label, scope, once, view);
      project(n.pos, scope, once, view);
      project(n.neg, scope, once, view);
      return e;
    }
    // Project both sides so obs forms are numbered the same in every view.
    ExprPtr pos = project(n.pos, scope, once, view);
    ExprPtr neg = project(n.neg, scope, once, view);
    return view->at(site) ? pos : neg;
  }

  ExprPtr project_node(const Expr::Obs& n, const ExprPtr& e, const Scope& scope, bool once, const View* view) {
    label_site(*n.label, scope, "obs");  // must resolve, though the copy decides at run time
    std::uint32_t obs_id = next_obs_++;
    if (has_store_effect(*n.fac))
      throw NotOracleSafe("obs over an expression with store effects: " + to_source(*n.fac), e->loc);
    if (!view) {
      project(n.label, scope, once, view);
      project(n.key, scope, once, view);
      project(n.fac, scope, once, view);
      return e;
    }
    return make_expr(Expr::ObsSelect{project(n.label, scope, once, view), project(n.key, scope, once, view),
                                     project(n.fac, scope, once, view), obs_id},
                     e->loc);
  }

  ExprPtr project_node(const Expr::If& n, const ExprPtr& e, const Scope& scope, bool once, const View* view) {
    return make_expr(Expr::If{project(n.cond, scope, once, view), project(n.then, scope, once, view),
                              project(n.otherwise, scope, once, view)},
                     e->loc);
  }

  ExprPtr project_node(const Expr::Begin& n, const ExprPtr& e, const Scope& scope, bool once, const View* view) {
    std::vector<ExprPtr> body;
    for (const auto& x : n.body) body.push_back(project(x, scope, once, view));
    return make_expr(Expr::Begin{std::move(body)}, e->loc);
  }

  ExprPtr project_node(const Expr::ObsSelect&, const ExprPtr& e, const Scope&, bool, const View*) {
    throw NotOracleSafe("program is already projected", e->loc);
  }

  const View* view_;
  std::uint32_t next_obs_ = 1;
  std::unordered_map<std::string, std::optional<std::uint32_t>> globals_;
  OracleInfo info_;
};

}  // namespace detail

/// Checks that a program is oracle-safe and lists its label binders.
inline OracleInfo analyze_program(const Program& p) {
  detail::Projector projector(nullptr);
  projector.run(p);
  return projector.info();
}

/// The program one secure-multi-execution copy runs for `view`: every
/// `facet` keeps only the side the view selects, and every `obs` becomes an
/// ObsSelect (see StandardEvaluator).
inline Program project_program(const Program& p, const View& view) {
  detail::Projector projector(&view);
  return projector.run(p);
}

// ---------------------------------------------------------------------------
// Standard (facet-free) evaluator

/// Ordinary call-by-value evaluation with plain boxes. Shares the value
/// representation and pure primitives with the faceted evaluator but none of
/// the facet machinery.
class StandardEvaluator {
 public:
  /// An obs whose policy decision may disagree with the copy's own view of
  /// the label. `occurrence` counts executions of that obs form in this run.
  struct Declassification {
    std::uint32_t label_site;
    bool decision;
    std::uint32_t obs_id;
    std::uint64_t occurrence;
  };
  /// Returns the observed value when it must come from another copy, or
  /// nothing to evaluate the obs body locally.
  using Declassifier = std::function<std::optional<Value>(const Declassification&)>;

  /// Thrown when the run reaches the obs occurrence set by capture_at().
  struct Captured {
    Value value;
  };

  StandardEvaluator() : globals_(make_frame()) {}
  StandardEvaluator(const StandardEvaluator&) = delete;
  StandardEvaluator& operator=(const StandardEvaluator&) = delete;
  ~StandardEvaluator() { globals_->bindings.clear(); }

  void set_output(std::ostream* out) { out_ = out; }
  void set_declassifier(Declassifier d) { declassify_ = std::move(d); }
  void capture_at(std::uint32_t obs_id, std::uint64_t occurrence) { capture_ = {obs_id, occurrence}; }

  std::vector<Value> run(const Program& p) {
    std::vector<Value> out;
    for (const auto& form : p.forms) {
      Value v = eval(*form.expr, globals_);
      if (form.name)
        globals_->bindings[*form.name] = v;
      else
        out.push_back(v);
    }
    return out;
  }

  Value eval(const Expr& e, const EnvPtr& env) {
    try {
      return std::visit([&](const auto& n) { return eval_node(n, e, env); }, e.node);
    } catch (Error& err) {
      err.attach(e.loc);
      throw;
    }
  }

  Value apply(const Value& fn, const std::vector<Value>& args) {
    if (fn.is_star()) return Value::star();
    if (fn.is(Kind::Primitive)) {
      const auto& name = fn.primitive_name();
      if (name == "display") {
        detail::expect_count(name, args, 1, 1);
        if (args[0].is_star()) throw StarObserved("display of #star");
        if (out_) *out_ << display_text(args[0]);
        return Value::void_value();
      }
      if (name == "error") throw UserError(error_message(args));
      for (const auto& a : args)
        if (a.is_star()) return Value::star();
      return apply_pure_primitive(name, args);
    }
    if (!fn.is(Kind::Closure)) throw TypeError("cannot apply non-procedure " + print(fn));
    const Closure& c = fn.as_closure();
    if (c.params.size() != args.size())
      throw ArityError(print(fn) + ": expected " + std::to_string(c.params.size()) + " argument(s), got " +
                       std::to_string(args.size()));
    EnvPtr frame = make_frame(c.env);
    for (std::size_t i = 0; i < args.size(); ++i) frame->bindings[c.params[i]] = args[i];
    return eval(*c.body, frame);
  }

 private:
  Value eval_node(const Expr::Const& n, const Expr&, const EnvPtr&) { return n.value; }
  Value eval_node(const Expr::Var& n, const Expr& e, const EnvPtr& env) { return lookup(env, n.name, e.loc); }
  Value eval_node(const Expr::PrimRef& n, const Expr&, const EnvPtr&) { return Value::primitive(n.name); }
  Value eval_node(const Expr::StarLit&, const Expr&, const EnvPtr&) { return Value::star(); }
  Value eval_node(const Expr::Lambda& n, const Expr&, const EnvPtr& env) {
    return Value::closure(Closure{n.params, n.body, env, n.name});
  }

  Value eval_node(const Expr::Apply& n, const Expr&, const EnvPtr& env) {
    Value fn = eval(*n.fn, env);
    std::vector<Value> args;
    for (const auto& a : n.args) args.push_back(eval(*a, env));
    return apply(fn, args);
  }

  Value eval_node(const Expr::Box& n, const Expr&, const EnvPtr& env) {
    Value v = eval(*n.init, env);
    cells_.push_back(v);
    return Value::address(cells_.size() - 1);
  }

  Value& cell(const Value& target, const char* op) {
    if (!target.is(Kind::Address)) throw TypeError(std::string(op) + ": expected a box, got " + print(target));
    return cells_.at(target.as_address());
  }

  Value eval_node(const Expr::Unbox& n, const Expr&, const EnvPtr& env) {
    Value target = eval(*n.target, env);
    if (target.is_star()) return Value::star();
    return cell(target, "unbox");
  }

  Value eval_node(const Expr::SetBang& n, const Expr&, const EnvPtr& env) {
    Value target = eval(*n.target, env);
    Value v = eval(*n.value, env);
    if (!target.is_star()) cell(target, "set!") = v;
    return v;
  }

  Value eval_node(const Expr::LetLabel& n, const Expr&, const EnvPtr& env) {
    Value policy = eval(*n.policy, env);
    if (!policy.is(Kind::Closure)) throw TypeError("let-label: policy must be a procedure, got " + print(policy));
    LabelId id{next_ordinal_++, n.name, n.site};
    policies_.emplace(id.ordinal, policy);
    EnvPtr inner = make_frame(env);
    inner->bindings[n.name] = Value::label(id);
    return eval(*n.body, inner);
  }

  Value eval_node(const Expr::ObsSelect& n, const Expr& e, const EnvPtr& env) {
    Value l = eval(*n.label, env);
    if (!l.is(Kind::Label)) throw TypeError("obs: expected a label, got " + print(l));
    Value key = eval(*n.key, env);
    Value decision = apply(policies_.at(l.as_label().ordinal), {key});
    if (decision.is_star()) throw PolicyError("policy of " + l.as_label().name + " returned #star");
    std::uint64_t occurrence = ++obs_counts_[n.id];
    // The body is effect-free, so every copy evaluates it even when the value
    // will come from elsewhere. That keeps obs occurrence counts aligned
    // across copies and lets a replay reach an obs nested inside this one.
    std::optional<Value> local;
    std::exception_ptr failure;
    try {
      local = eval(*n.fac, env);
    } catch (const NotOracleSafe&) {
      throw;
    } catch (const Error&) {
      failure = std::current_exception();
    }
    std::optional<Value> v;
    if (declassify_) v = declassify_({l.as_label().site, decision.truthy(), n.id, occurrence});
    if (v) {
      if (!plain_data(*v))
        throw NotOracleSafe("obs releases " + print(*v) + " from another copy; only plain data can cross copies", e.loc);
    } else {
      if (failure) std::rethrow_exception(failure);
      v = local;
    }
    if (capture_ && capture_->first == n.id && capture_->second == occurrence) throw Captured{*v};
    return *v;
  }

  static bool plain_data(const Value& v) {
    switch (v.kind()) {
      case Kind::Int:
      case Kind::Bool:
      case Kind::String:
      case Kind::Nil:
      case Kind::Star:
      case Kind::Void:
        return true;
      case Kind::Pair:
        return plain_data(v.car()) && plain_data(v.cdr());
      default:
        return false;
    }
  }

  Value eval_node(const Expr::If& n, const Expr&, const EnvPtr& env) {
    Value c = eval(*n.cond, env);
    if (c.is_star()) return Value::star();
    return eval(c.truthy() ? *n.then : *n.otherwise, env);
  }

  Value eval_node(const Expr::Begin& n, const Expr&, const EnvPtr& env) {
    Value last = Value::void_value();
    for (const auto& x : n.body) last = eval(*x, env);
    return last;
  }

  Value eval_node(const Expr::FacetCreate&, const Expr&, const EnvPtr&) {
    throw TypeError("facet form reached the standard evaluator; project the program first");
  }
  Value eval_node(const Expr::Obs&, const Expr&, const EnvPtr&) {
    throw TypeError("obs form reached the standard evaluator; project the program first");
  }

  EnvPtr globals_;
  std::vector<Value> cells_;
  std::unordered_map<std::uint64_t, Value> policies_;
  std::uint64_t next_ordinal_ = 1;
  std::ostream* out_ = nullptr;
  Declassifier declassify_;
  std::optional<std::pair<std::uint32_t, std::uint64_t>> capture_;
  std::unordered_map<std::uint32_t, std::uint64_t> obs_counts_;
};

/// Printed outputs of a standard run, or `error: Kind` when it fails.
inline std::string standard_eval(const Program& p) {
  StandardEvaluator ev;
  try {
    std::string out;
    for (const auto& v : ev.run(p)) out += print(v) + "\n";
    return out;
  } catch (const Error& e) {
    return "error: " + e.kind() + "\n";
  }
}

namespace detail {

/// Runs the 2^k copies of a program. A copy whose obs decision disagrees
/// with its own view of the label takes the observed value from the copy
/// that agrees, at the same occurrence of the same obs form; that copy is
/// replayed from the start up to that point.
class MultiExecution {
 public:
  explicit MultiExecution(const Program& p) : program_(p) {}

  /// Printed outputs of the copy for `view`. NotOracleSafe propagates.
  std::string outputs(const View& view) {
    StandardEvaluator ev;
    configure(ev, view, 0);
    try {
      std::string out;
      for (const auto& v : ev.run(projected(view))) out += print(v) + "\n";
      return out;
    } catch (const NotOracleSafe&) {
      throw;
    } catch (const Error& e) {
      return "error: " + e.kind() + "\n";
    }
  }

 private:
  static constexpr int kMaxRedirects = 8;

  const Program& projected(const View& view) {
    auto it = cache_.find(view.sees);
    if (it == cache_.end()) it = cache_.emplace(view.sees, project_program(program_, view)).first;
    return it->second;
  }

  void configure(StandardEvaluator& ev, const View& view, int depth) {
    ev.set_declassifier([this, view, depth](const StandardEvaluator::Declassification& d) -> std::optional<Value> {
      if (view.at(d.label_site) == d.decision) return std::nullopt;
      if (depth >= kMaxRedirects) throw NotOracleSafe("obs decisions keep redirecting between copies");
      return capture(view.with(d.label_site, d.decision), d.obs_id, d.occurrence, depth + 1);
    });
  }

  Value capture(const View& view, std::uint32_t obs_id, std::uint64_t occurrence, int depth) {
    StandardEvaluator ev;
    configure(ev, view, depth);
    ev.capture_at(obs_id, occurrence);
    try {
      ev.run(projected(view));
    } catch (const StandardEvaluator::Captured& c) {
      return c.value;
    }
    throw NotOracleSafe("copy " + view.str() + " never reaches occurrence " + std::to_string(occurrence) +
                        " of obs form " + std::to_string(obs_id));
  }

  const Program& program_;
  std::map<std::map<std::uint32_t, bool>, Program> cache_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Projection-equivalence check

struct OracleOptions {
  std::size_t max_labels = 3;
  /// Forwarded to the faceted evaluator (mutation testing).
  EvalOptions faceted;
};

struct ViewOutcome {
  View view;
  std::string faceted;   // faceted result projected through the view
  std::string standard;  // standard evaluation of the projected program
  bool pass = false;
};

struct OracleReport {
  std::string program_id;
  std::size_t labels = 0;
  std::map<std::uint32_t, std::string> label_names;
  std::vector<ViewOutcome> views;
  bool pass = false;

  const ViewOutcome* first_failure() const {
    for (const auto& v : views)
      if (!v.pass) return &v;
    return nullptr;
  }

  std::string text() const {
    std::ostringstream out;
    out << (pass ? "PASS " : "FAIL ") << program_id << " (" << labels << " label" << (labels == 1 ? "" : "s") << ", "
        << views.size() << " view" << (views.size() == 1 ? "" : "s") << ")\n";
    for (const auto& v : views) {
      out << "  " << (v.pass ? "ok   " : "DIFF ") << v.view.str(label_names) << "\n";
      if (!v.pass) {
        out << "    faceted : " << v.faceted;
        out << "    standard: " << v.standard;
      }
    }
    return out.str();
  }

  nlohmann::json json() const {
    nlohmann::json views_json = nlohmann::json::array();
    for (const auto& v : views)
      views_json.push_back({{"view", v.view.str(label_names)}, {"pass", v.pass}});
    return {{"program", program_id}, {"k", labels}, {"pass", pass}, {"views", views_json}};
  }
};

namespace detail {

/// Result of one faceted run: printed-then-projected per view later.
struct FacetedRun {
  std::vector<Value> values;
  std::optional<std::string> error_kind;

  std::string under(const View& view) const {
    if (error_kind) return "error: " + *error_kind + "\n";
    std::string out;
    for (const auto& v : values) out += print(project_value(v, view)) + "\n";
    return out;
  }
};

inline FacetedRun run_faceted(const Program& p, const EvalOptions& options) {
  Interpreter interp(options);
  interp.set_output(nullptr);
  FacetedRun run;
  try {
    run.values = interp.run(p);
  } catch (const Error& e) {
    run.error_kind = e.kind();
  }
  return run;
}

}  // namespace detail

/// Runs the faceted evaluator once, projects its outputs through every view,
/// and compares them with the standard copy for that view. Only printed
/// outputs are compared, never stores. Throws NotOracleSafe.
inline OracleReport check_projection_equivalence(const Program& p, std::string program_id = "<program>",
                                                 const OracleOptions& options = {}) {
  OracleInfo info = analyze_program(p);
  if (info.sites.size() > options.max_labels)
    throw NotOracleSafe("program has " + std::to_string(info.sites.size()) + " label binders; limit is " +
                        std::to_string(options.max_labels));

  OracleReport report;
  report.program_id = std::move(program_id);
  report.labels = info.sites.size();
  report.label_names = info.names;

  const detail::FacetedRun faceted = detail::run_faceted(p, options.faceted);
  detail::MultiExecution copies(p);
  const std::size_t k = info.sites.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    View view;
    // First binder varies slowest; the all-positive view comes first.
    for (std::size_t i = 0; i < k; ++i) view.sees[info.sites[i]] = !((mask >> (k - 1 - i)) & 1);
    ViewOutcome outcome;
    outcome.view = view;
    outcome.faceted = faceted.under(view);
    outcome.standard = copies.outputs(view);
    outcome.pass = outcome.faceted == outcome.standard;
    report.views.push_back(std::move(outcome));
  }
  report.pass = report.first_failure() == nullptr;
  return report;
}

}  // namespace fexec
