#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "fexec/errors.hpp"
#include "fexec/expr.hpp"

namespace fexec {

/// Names of the built-in primitives. An unshadowed reference to one of these
/// reads as Expr::PrimRef.
inline const std::set<std::string, std::less<>>& primitive_names() {
  static const std::set<std::string, std::less<>> names = {
      "cons", "car", "cdr", "null?", "pair?", "list", "=", "<", ">", "+", "-", "*",
      "not", "display", "error"};
  return names;
}

namespace sexp {

struct Node;

struct Symbol {
  std::string name;
};
struct Int {
  std::int64_t value;
};
struct Str {
  std::string text;
};
struct List {
  std::vector<Node> items;
  bool dotted = false;  // last item follows a `.`
};

struct Node {
  std::variant<Symbol, Int, Str, List> data;
  SourceLoc loc;

  const Symbol* symbol() const { return std::get_if<Symbol>(&data); }
  const List* list() const { return std::get_if<List>(&data); }
  bool is_symbol(std::string_view s) const {
    auto* sym = symbol();
    return sym && sym->name == s;
  }
};

/// Tokenizes and parses s-expressions. `;` starts a line comment; `[` and
/// `]` are interchangeable with parentheses.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<Node> parse_all() {
    std::vector<Node> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(parse_one());
      skip_space();
    }
    return out;
  }

 private:
  SourceLoc here() const { return {line_, col_}; }

  char peek() const { return text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = peek();
      if (c == ';') {
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f') {
        advance();
      } else {
        break;
      }
    }
  }

  static bool is_delimiter(char c) {
    return c == '(' || c == ')' || c == '[' || c == ']' || c == '"' || c == ';' || c == '\'' ||
           c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
  }

  Node parse_one() {
    SourceLoc loc = here();
    char c = peek();
    if (c == '(' || c == '[') {
      char close = c == '(' ? ')' : ']';
      advance();
      List list;
      while (true) {
        skip_space();
        if (pos_ >= text_.size()) throw SyntaxError("unbalanced parentheses: missing '" + std::string(1, close) + "'", loc);
        char d = peek();
        if (d == ')' || d == ']') {
          if (d != close) throw SyntaxError("mismatched closing bracket", here());
          advance();
          break;
        }
        if (list.dotted) throw SyntaxError("expected closing bracket after dotted tail", here());
        Node item = parse_one();
        if (item.is_symbol(".")) {
          if (list.items.empty()) throw SyntaxError("misplaced '.'", item.loc);
          skip_space();
          if (pos_ >= text_.size()) throw SyntaxError("unbalanced parentheses", loc);
          list.items.push_back(parse_one());
          list.dotted = true;
          continue;
        }
        list.items.push_back(std::move(item));
      }
      return Node{std::move(list), loc};
    }
    if (c == ')' || c == ']') throw SyntaxError("unbalanced parentheses: unexpected closing bracket", loc);
    if (c == '\'') {
      advance();
      skip_space();
      if (pos_ >= text_.size()) throw SyntaxError("quote without datum", loc);
      List quoted;
      quoted.items.push_back(Node{Symbol{"quote"}, loc});
      quoted.items.push_back(parse_one());
      return Node{std::move(quoted), loc};
    }
    if (c == '"') return Node{Str{read_string()}, loc};

    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delimiter(peek())) advance();
    std::string_view atom = text_.substr(start, pos_ - start);
    if (looks_numeric(atom)) {
      std::int64_t value = 0;
      auto first = atom.data() + (atom.front() == '+' ? 1 : 0);
      auto [ptr, ec] = std::from_chars(first, atom.data() + atom.size(), value);
      if (ec != std::errc{} || ptr != atom.data() + atom.size())
        throw SyntaxError("bad integer literal '" + std::string(atom) + "'", loc);
      return Node{Int{value}, loc};
    }
    return Node{Symbol{std::string(atom)}, loc};
  }

  static bool looks_numeric(std::string_view a) {
    std::size_t i = (a.front() == '-' || a.front() == '+') ? 1 : 0;
    if (i == a.size()) return false;
    return std::all_of(a.begin() + static_cast<std::ptrdiff_t>(i), a.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
  }

  std::string read_string() {
    SourceLoc loc = here();
    advance();  // opening quote
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) throw SyntaxError("unterminated string literal", loc);
      char c = peek();
      advance();
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= text_.size()) throw SyntaxError("unterminated string literal", loc);
        char e = peek();
        advance();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: throw SyntaxError(std::string("unknown escape \\") + e, here());
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace sexp

/// Turns source text into core syntax. A Reader keeps toplevel names and
/// binder-site numbering across calls, which the REPL relies on.
class Reader {
 public:
  Program parse(std::string_view text) {
    auto nodes = sexp::Parser(text).parse_all();

    std::unordered_set<std::string> defined_here;
    for (const auto& n : nodes) {
      if (auto name = definition_name(n)) {
        if (!defined_here.insert(*name).second)
          throw SyntaxError("duplicate definition of '" + *name + "'", n.loc);
        globals_.insert(*name);
      }
    }

    Program program;
    for (const auto& n : nodes) program.forms.push_back(toplevel(n));
    return program;
  }

 private:
  static std::optional<std::string> definition_name(const sexp::Node& n) {
    auto* list = n.list();
    if (!list || list->items.size() < 2 || !list->items[0].is_symbol("define")) return std::nullopt;
    const auto& target = list->items[1];
    if (auto* s = target.symbol()) return s->name;
    if (auto* l = target.list(); l && !l->items.empty())
      if (auto* s = l->items[0].symbol()) return s->name;
    return std::nullopt;
  }

  TopLevel toplevel(const sexp::Node& n) {
    auto* list = n.list();
    if (list && !list->items.empty() && list->items[0].is_symbol("define")) {
      check_proper(*list, n.loc);
      const auto& items = list->items;
      if (items.size() < 3) throw SyntaxError("define: expected (define name expr)", n.loc);
      if (auto* name = items[1].symbol()) {
        if (items.size() != 3) throw SyntaxError("define: expected exactly one expression", n.loc);
        check_binder_name(name->name, items[1].loc);
        ExprPtr e = expr(items[2]);
        if (auto* lam = e->as<Expr::Lambda>()) {
          Expr::Lambda named = *lam;
          named.name = name->name;
          e = make_expr(std::move(named), e->loc);
        }
        return TopLevel{name->name, e, n.loc};
      }
      auto* header = items[1].list();
      if (!header || header->items.empty() || !header->items[0].symbol())
        throw SyntaxError("define: malformed header", items[1].loc);
      check_proper(*header, items[1].loc);
      std::string fname = header->items[0].symbol()->name;
      check_binder_name(fname, items[1].loc);
      auto params = param_list(header->items, 1, items[1].loc);
      ExprPtr body = with_scope(params, [&] { return body_expr(items, 2, n.loc); });
      return TopLevel{fname, make_expr(Expr::Lambda{params, body, fname}, n.loc), n.loc};
    }
    return TopLevel{std::nullopt, expr(n), n.loc};
  }

  static void check_proper(const sexp::List& l, SourceLoc loc) {
    if (l.dotted) throw SyntaxError("unexpected dotted form", loc);
  }

  static bool is_keyword(std::string_view s) {
    static const std::set<std::string, std::less<>> kw = {
        "define", "lambda", "let", "let*", "if", "begin", "box", "unbox", "set!", "let-label",
        "facet", "obs", "and", "or", "quote", "star", "★"};
    return kw.count(s) > 0;
  }

  static void check_binder_name(const std::string& name, SourceLoc loc) {
    if (is_keyword(name) || name == "true" || name == "false" || name == "#t" || name == "#f")
      throw SyntaxError("cannot bind reserved name '" + name + "'", loc);
  }

  std::vector<std::string> param_list(const std::vector<sexp::Node>& items, std::size_t from,
                                      SourceLoc loc) {
    std::vector<std::string> params;
    for (std::size_t i = from; i < items.size(); ++i) {
      auto* s = items[i].symbol();
      if (!s) throw SyntaxError("parameter must be a symbol", items[i].loc);
      check_binder_name(s->name, items[i].loc);
      if (std::find(params.begin(), params.end(), s->name) != params.end())
        throw SyntaxError("duplicate parameter '" + s->name + "'", items[i].loc);
      params.push_back(s->name);
    }
    (void)loc;
    return params;
  }

  template <class F>
  ExprPtr with_scope(const std::vector<std::string>& names, F&& f) {
    for (const auto& n : names) scope_.push_back(n);
    struct Pop {
      std::vector<std::string>& s;
      std::size_t k;
      ~Pop() { s.resize(s.size() - k); }
    } pop{scope_, names.size()};
    return f();
  }

  bool is_bound(const std::string& name) const {
    return std::find(scope_.begin(), scope_.end(), name) != scope_.end() || globals_.count(name) > 0;
  }

  /// Body forms starting at `from`; several forms become a Begin.
  ExprPtr body_expr(const std::vector<sexp::Node>& items, std::size_t from, SourceLoc loc) {
    if (from >= items.size()) throw SyntaxError("empty body", loc);
    if (from + 1 == items.size()) return expr(items[from]);
    std::vector<ExprPtr> seq;
    for (std::size_t i = from; i < items.size(); ++i) seq.push_back(expr(items[i]));
    return make_expr(Expr::Begin{std::move(seq)}, loc);
  }

  static void expect_arity(const sexp::List& l, std::size_t n, const char* form, SourceLoc loc) {
    if (l.items.size() != n + 1)
      throw SyntaxError(std::string(form) + ": expected " + std::to_string(n) + " subexpression" +
                            (n == 1 ? "" : "s") + ", got " + std::to_string(l.items.size() - 1),
                        loc);
  }

  Value datum(const sexp::Node& n) {
    return std::visit(
        [&](const auto& x) -> Value {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, sexp::Int>) return Value::integer(x.value);
          else if constexpr (std::is_same_v<T, sexp::Str>) return Value::string(x.text);
          else if constexpr (std::is_same_v<T, sexp::Symbol>) {
            if (x.name == "true" || x.name == "#t") return Value::boolean(true);
            if (x.name == "false" || x.name == "#f") return Value::boolean(false);
            throw SyntaxError("quoted symbols are not supported", n.loc);
          } else {
            Value tail = Value::nil();
            std::size_t count = x.items.size();
            if (x.dotted) {
              tail = datum(x.items.back());
              --count;
            }
            std::vector<Value> elems;
            for (std::size_t i = 0; i < count; ++i) elems.push_back(datum(x.items[i]));
            for (auto it = elems.rbegin(); it != elems.rend(); ++it) tail = Value::pair(*it, tail);
            return tail;
          }
        },
        n.data);
  }

  ExprPtr expr(const sexp::Node& n) {
    SourceLoc loc = n.loc;
    if (auto* i = std::get_if<sexp::Int>(&n.data)) return make_expr(Expr::Const{Value::integer(i->value)}, loc);
    if (auto* s = std::get_if<sexp::Str>(&n.data)) return make_expr(Expr::Const{Value::string(s->text)}, loc);
    if (auto* sym = n.symbol()) {
      const auto& name = sym->name;
      if (name == "true" || name == "#t") return make_expr(Expr::Const{Value::boolean(true)}, loc);
      if (name == "false" || name == "#f") return make_expr(Expr::Const{Value::boolean(false)}, loc);
      if (name == "#star") return make_expr(Expr::StarLit{}, loc);
      if (is_keyword(name)) throw SyntaxError("keyword '" + name + "' used as an expression", loc);
      if (!is_bound(name) && primitive_names().count(name)) return make_expr(Expr::PrimRef{name}, loc);
      return make_expr(Expr::Var{name}, loc);
    }

    const auto& list = *n.list();
    check_proper(list, loc);
    const auto& items = list.items;
    if (items.empty()) throw SyntaxError("empty application '()'; use '() for the empty list", loc);

    if (auto* head = items[0].symbol(); head && is_keyword(head->name)) {
      const std::string& form = head->name;
      if (form == "quote") {
        expect_arity(list, 1, "quote", loc);
        return make_expr(Expr::Const{datum(items[1])}, loc);
      }
      if (form == "star" || form == "★") {
        expect_arity(list, 0, form.c_str(), loc);
        return make_expr(Expr::StarLit{}, loc);
      }
      if (form == "define") throw SyntaxError("define is only allowed at toplevel", loc);
      if (form == "lambda") {
        if (items.size() < 3) throw SyntaxError("lambda: expected parameters and body", loc);
        auto* ps = items[1].list();
        if (!ps) throw SyntaxError("lambda: parameter list must be a list", items[1].loc);
        check_proper(*ps, items[1].loc);
        auto params = param_list(ps->items, 0, items[1].loc);
        ExprPtr body = with_scope(params, [&] { return body_expr(items, 2, loc); });
        return make_expr(Expr::Lambda{params, body, {}}, loc);
      }
      if (form == "let" || form == "let*") return let_form(list, form == "let*", loc);
      if (form == "if") {
        expect_arity(list, 3, "if", loc);
        return make_expr(Expr::If{expr(items[1]), expr(items[2]), expr(items[3])}, loc);
      }
      if (form == "begin") {
        if (items.size() < 2) throw SyntaxError("begin: expected at least one expression", loc);
        std::vector<ExprPtr> seq;
        for (std::size_t i = 1; i < items.size(); ++i) seq.push_back(expr(items[i]));
        return make_expr(Expr::Begin{std::move(seq)}, loc);
      }
      if (form == "box") {
        expect_arity(list, 1, "box", loc);
        return make_expr(Expr::Box{expr(items[1])}, loc);
      }
      if (form == "unbox") {
        expect_arity(list, 1, "unbox", loc);
        return make_expr(Expr::Unbox{expr(items[1])}, loc);
      }
      if (form == "set!") {
        expect_arity(list, 2, "set!", loc);
        return make_expr(Expr::SetBang{expr(items[1]), expr(items[2])}, loc);
      }
      if (form == "let-label") {
        expect_arity(list, 3, "let-label", loc);
        auto* name = items[1].symbol();
        if (!name) throw SyntaxError("let-label: label name must be a symbol", items[1].loc);
        check_binder_name(name->name, items[1].loc);
        std::uint32_t site = next_site_++;
        ExprPtr policy = expr(items[2]);
        ExprPtr body = with_scope({name->name}, [&] { return expr(items[3]); });
        return make_expr(Expr::LetLabel{name->name, policy, body, site}, loc);
      }
      if (form == "facet") {
        expect_arity(list, 3, "facet", loc);
        return make_expr(Expr::FacetCreate{expr(items[1]), expr(items[2]), expr(items[3])}, loc);
      }
      if (form == "obs") {
        expect_arity(list, 3, "obs", loc);
        return make_expr(Expr::Obs{expr(items[1]), expr(items[2]), expr(items[3])}, loc);
      }
      if (form == "and") return and_form(items, 1, loc);
      if (form == "or") return or_form(items, 1, loc);
    }

    ExprPtr fn = expr(items[0]);
    std::vector<ExprPtr> args;
    for (std::size_t i = 1; i < items.size(); ++i) args.push_back(expr(items[i]));
    return make_expr(Expr::Apply{fn, std::move(args)}, loc);
  }

  ExprPtr let_form(const sexp::List& list, bool sequential, SourceLoc loc) {
    const auto& items = list.items;
    const char* form = sequential ? "let*" : "let";
    if (items.size() < 3) throw SyntaxError(std::string(form) + ": expected bindings and body", loc);
    auto* bindings = items[1].list();
    if (!bindings) throw SyntaxError(std::string(form) + ": bindings must be a list", items[1].loc);

    std::vector<std::string> names;
    std::vector<const sexp::Node*> inits;
    for (const auto& b : bindings->items) {
      auto* pair = b.list();
      if (!pair || pair->dotted || pair->items.size() != 2 || !pair->items[0].symbol())
        throw SyntaxError(std::string(form) + ": binding must be [name expr]", b.loc);
      names.push_back(pair->items[0].symbol()->name);
      check_binder_name(names.back(), pair->items[0].loc);
      inits.push_back(&pair->items[1]);
    }

    if (!sequential) {
      // Validates duplicates the same way lambda does.
      param_list([&] {
        std::vector<sexp::Node> syms;
        for (const auto& b : bindings->items) syms.push_back(b.list()->items[0]);
        return syms;
      }(), 0, items[1].loc);
      std::vector<ExprPtr> args;
      for (auto* init : inits) args.push_back(expr(*init));
      ExprPtr body = with_scope(names, [&] { return body_expr(items, 2, loc); });
      return make_expr(Expr::Apply{make_expr(Expr::Lambda{names, body, {}}, loc), std::move(args)}, loc);
    }
    return let_star(names, inits, 0, items, loc);
  }

  ExprPtr let_star(const std::vector<std::string>& names, const std::vector<const sexp::Node*>& inits,
                   std::size_t i, const std::vector<sexp::Node>& items, SourceLoc loc) {
    if (i == names.size()) {
      if (names.empty())
        return make_expr(Expr::Apply{make_expr(Expr::Lambda{{}, body_expr(items, 2, loc), {}}, loc), {}}, loc);
      return body_expr(items, 2, loc);
    }
    ExprPtr init = expr(*inits[i]);
    ExprPtr body = with_scope({names[i]}, [&] { return let_star(names, inits, i + 1, items, loc); });
    return make_expr(Expr::Apply{make_expr(Expr::Lambda{{names[i]}, body, {}}, loc), {init}}, loc);
  }

  ExprPtr and_form(const std::vector<sexp::Node>& items, std::size_t i, SourceLoc loc) {
    if (i == items.size()) return make_expr(Expr::Const{Value::boolean(true)}, loc);
    if (i + 1 == items.size()) return expr(items[i]);
    ExprPtr first = expr(items[i]);
    return make_expr(Expr::If{first, and_form(items, i + 1, loc), make_expr(Expr::Const{Value::boolean(false)}, loc)},
                     loc);
  }

  ExprPtr or_form(const std::vector<sexp::Node>& items, std::size_t i, SourceLoc loc) {
    if (i == items.size()) return make_expr(Expr::Const{Value::boolean(false)}, loc);
    if (i + 1 == items.size()) return expr(items[i]);
    ExprPtr first = expr(items[i]);
    std::string tmp = "%or" + std::to_string(next_temp_++);
    ExprPtr rest = with_scope({tmp}, [&] { return or_form(items, i + 1, loc); });
    ExprPtr t = make_expr(Expr::Var{tmp}, loc);
    ExprPtr test = make_expr(Expr::If{t, t, rest}, loc);
    return make_expr(Expr::Apply{make_expr(Expr::Lambda{{tmp}, test, {}}, loc), {first}}, loc);
  }

  std::unordered_set<std::string> globals_;
  std::vector<std::string> scope_;
  std::uint32_t next_site_ = 1;
  std::uint32_t next_temp_ = 0;
};

/// True when `text` ends inside an open bracket or string, so an
/// interactive reader should keep collecting lines.
inline bool needs_more_input(std::string_view text) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '(' || c == '[') {
      ++depth;
    } else if (c == ')' || c == ']') {
      --depth;
    }
  }
  return in_string || depth > 0;
}

/// Parses a whole program. Throws SyntaxError with a line/column.
inline Program parse_program(std::string_view text) { return Reader{}.parse(text); }

}  // namespace fexec
