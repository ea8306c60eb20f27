#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fexec/errors.hpp"
#include "fexec/print.hpp"
#include "fexec/value.hpp"

namespace fexec {

/// A signed label: +l or -l.
struct Branch {
  bool positive = true;
  LabelId label;

  static Branch pos(LabelId l) { return {true, std::move(l)}; }
  static Branch neg(LabelId l) { return {false, std::move(l)}; }

  friend bool operator==(const Branch& a, const Branch& b) {
    return a.positive == b.positive && a.label == b.label;
  }
};

/// Program counter: the branches the current evaluation context has
/// committed to. Never holds both signs of one label.
class PC {
 public:
  PC() = default;

  bool empty() const { return branches_.empty(); }
  std::size_t size() const { return branches_.size(); }

  bool has_positive(const LabelId& l) const {
    auto it = branches_.find(l);
    return it != branches_.end() && it->second;
  }
  bool has_negative(const LabelId& l) const {
    auto it = branches_.find(l);
    return it != branches_.end() && !it->second;
  }
  bool mentions(const LabelId& l) const { return branches_.count(l) > 0; }
  bool contains(const Branch& b) const { return b.positive ? has_positive(b.label) : has_negative(b.label); }

  /// pc ∪ {b}. Throws ConsistencyError if the opposite branch is present.
  PC extend(const Branch& b) const {
    auto it = branches_.find(b.label);
    if (it != branches_.end()) {
      if (it->second != b.positive)
        throw ConsistencyError("pc already holds " + std::string(it->second ? "+" : "-") + b.label.name +
                               "; cannot add the opposite branch");
      return *this;
    }
    PC out = *this;
    out.branches_.emplace(b.label, b.positive);
    return out;
  }

  /// Branches in ascending label order.
  std::vector<Branch> branches() const {
    std::vector<Branch> out;
    for (const auto& [l, positive] : branches_) out.push_back({positive, l});
    return out;
  }

  /// `{+l1,-l2}`
  std::string str() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [l, positive] : branches_) {
      if (!first) out += ',';
      first = false;
      out += positive ? '+' : '-';
      out += l.name;
    }
    return out + "}";
  }

  friend bool operator==(const PC&, const PC&) = default;

 private:
  std::map<LabelId, bool> branches_;
};

inline PC pc_extend(const PC& pc, const Branch& b) { return pc.extend(b); }

/// Address-indexed heap. Boxes and label policies both live here.
class Store {
 public:
  Address allocate(Value v) {
    cells_.push_back(std::move(v));
    return cells_.size() - 1;
  }

  bool contains(Address a) const { return a < cells_.size(); }

  const Value& at(Address a) const {
    if (!contains(a)) throw TypeError("dangling address " + std::to_string(a));
    return cells_[a];
  }

  void put(Address a, Value v) {
    if (!contains(a)) throw TypeError("dangling address " + std::to_string(a));
    cells_[a] = std::move(v);
  }

  std::size_t size() const { return cells_.size(); }

 private:
  std::vector<Value> cells_;
};

// ---------------------------------------------------------------------------
// Canonical facet construction

/// Builds a facet equivalent to ⟨label ? left : right⟩ whose labels strictly
/// increase along every root-to-leaf path. Children must already be canonical.
/// Equal branches are not collapsed.
inline Value mkfacet(const LabelId& label, Value left, Value right) {
  if (left.is_facet() && left.facet_label() == label) left = left.left();
  if (right.is_facet() && right.facet_label() == label) right = right.right();

  const LabelId* head = nullptr;
  if (left.is_facet()) head = &left.facet_label();
  if (right.is_facet() && (!head || right.facet_label() < *head)) head = &right.facet_label();
  if (!head || label < *head) return Value::facet(label, std::move(left), std::move(right));

  // A child is rooted at a smaller label: hoist it above `label`.
  LabelId top = *head;
  auto pos = [&](const Value& v) { return v.is_facet() && v.facet_label() == top ? v.left() : v; };
  auto neg = [&](const Value& v) { return v.is_facet() && v.facet_label() == top ? v.right() : v; };
  Value l = mkfacet(label, pos(left), pos(right));
  Value r = mkfacet(label, neg(left), neg(right));
  return Value::facet(std::move(top), std::move(l), std::move(r));
}

/// ⟪pc ? positive : fallback⟫: `positive` at the focus named by pc, `fallback`
/// along every other branch of the spine.
inline Value construct_facet(const PC& pc, const Value& positive, const Value& fallback) {
  auto branches = pc.branches();
  Value out = positive;
  for (auto it = branches.rbegin(); it != branches.rend(); ++it) {
    out = it->positive ? mkfacet(it->label, out, fallback) : mkfacet(it->label, fallback, out);
  }
  return out;
}

/// Keeps only the parts of `v` visible under `pc`.
inline Value restrict_to_pc(const Value& v, const PC& pc) {
  if (!v.is_facet()) return v;
  const LabelId& l = v.facet_label();
  if (pc.has_positive(l)) return restrict_to_pc(v.left(), pc);
  if (pc.has_negative(l)) return restrict_to_pc(v.right(), pc);
  return mkfacet(l, restrict_to_pc(v.left(), pc), restrict_to_pc(v.right(), pc));
}

namespace detail {

inline void check_reference(const Value& target, const char* op) {
  if (target.is(Kind::Address) || target.is_star()) return;
  if (target.is_facet()) {
    check_reference(target.left(), op);
    check_reference(target.right(), op);
    return;
  }
  throw TypeError(std::string(op) + ": expected a box, got " + print(target));
}

inline void write_into(Store& store, const Value& target, const PC& pc, const Value& v) {
  if (target.is_star()) return;
  if (target.is(Kind::Address)) {
    Address a = target.as_address();
    store.put(a, construct_facet(pc, v, store.at(a)));
    return;
  }
  const LabelId& l = target.facet_label();
  if (pc.has_positive(l)) return write_into(store, target.left(), pc, v);
  if (pc.has_negative(l)) return write_into(store, target.right(), pc, v);
  write_into(store, target.left(), pc.extend(Branch::pos(l)), v);
  write_into(store, target.right(), pc.extend(Branch::neg(l)), v);
}

inline Value read_from(const Store& store, const Value& target, const PC& pc) {
  if (target.is_star()) return Value::star();
  if (target.is(Kind::Address)) return restrict_to_pc(store.at(target.as_address()), pc);
  const LabelId& l = target.facet_label();
  if (pc.has_positive(l)) return read_from(store, target.left(), pc);
  if (pc.has_negative(l)) return read_from(store, target.right(), pc);
  return mkfacet(l, read_from(store, target.left(), pc.extend(Branch::pos(l))),
                 read_from(store, target.right(), pc.extend(Branch::neg(l))));
}

}  // namespace detail

/// Faceted store update, in place. A faceted target writes each leaf under
/// the branch that reaches it; a star target is ignored.
inline void store_write_in_place(Store& store, const Value& target, const PC& pc, const Value& v) {
  detail::check_reference(target, "set!");
  detail::write_into(store, target, pc, v);
}

inline Store store_write(Store store, const Value& target, const PC& pc, const Value& v) {
  store_write_in_place(store, target, pc, v);
  return store;
}

/// Faceted store read, filtered by pc.
inline Value store_read(const Store& store, const Value& target, const PC& pc) {
  detail::check_reference(target, "unbox");
  return detail::read_from(store, target, pc);
}

/// Removes `label` from `v`, keeping the positive side when `decision` holds.
inline Value obs_project(const LabelId& label, const Value& v, bool decision) {
  if (!v.is_facet()) return v;
  const LabelId& k = v.facet_label();
  if (k == label) return decision ? v.left() : v.right();
  if (label < k) return v;  // canonical: label cannot occur below k
  return mkfacet(k, obs_project(label, v.left(), decision), obs_project(label, v.right(), decision));
}

// ---------------------------------------------------------------------------
// Inspection helpers

/// True when labels strictly increase along every root-to-leaf path.
inline bool is_canonical(const Value& v, const LabelId* above = nullptr) {
  if (!v.is_facet()) return true;
  if (above && !(*above < v.facet_label())) return false;
  return is_canonical(v.left(), &v.facet_label()) && is_canonical(v.right(), &v.facet_label());
}

inline void collect_labels(const Value& v, std::set<LabelId>& out) {
  if (!v.is_facet()) return;
  out.insert(v.facet_label());
  collect_labels(v.left(), out);
  collect_labels(v.right(), out);
}

inline bool mentions_label(const Value& v, const LabelId& l) {
  if (!v.is_facet()) return false;
  return v.facet_label() == l || mentions_label(v.left(), l) || mentions_label(v.right(), l);
}

}  // namespace fexec
