#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fexec/reader.hpp"

namespace fexec {
namespace {

const Expr& only_expr(const Program& p) {
  EXPECT_EQ(p.forms.size(), 1u);
  return *p.forms.at(0).expr;
}

TEST(Reader, DefineFunctionReturningEmptyList) {
  Program p = parse_program("(define (makeboard) '())");
  ASSERT_EQ(p.forms.size(), 1u);
  EXPECT_EQ(p.forms[0].name, "makeboard");
  auto* lam = p.forms[0].expr->as<Expr::Lambda>();
  ASSERT_NE(lam, nullptr);
  EXPECT_TRUE(lam->params.empty());
  auto* c = lam->body->as<Expr::Const>();
  ASSERT_NE(c, nullptr);
  EXPECT_TRUE(c->value.is(Kind::Nil));
  EXPECT_EQ(lam->name, "makeboard");
}

TEST(Reader, BareConstant) {
  Program p = parse_program("42");
  ASSERT_EQ(p.forms.size(), 1u);
  EXPECT_FALSE(p.forms[0].name);
  auto* c = only_expr(p).as<Expr::Const>();
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->value.as_int(), 42);
}

TEST(Reader, LetLabel) {
  const Expr& e = only_expr(parse_program("(let-label l (lambda (x) (= 1 x)) l)"));
  auto* ll = e.as<Expr::LetLabel>();
  ASSERT_NE(ll, nullptr);
  EXPECT_EQ(ll->name, "l");
  auto* pol = ll->policy->as<Expr::Lambda>();
  ASSERT_NE(pol, nullptr);
  EXPECT_EQ(pol->params, std::vector<std::string>{"x"});
  auto* body = ll->body->as<Expr::Var>();
  ASSERT_NE(body, nullptr);
  EXPECT_EQ(body->name, "l");
  // `=` is unshadowed, so it reads as a primitive reference.
  auto* app = pol->body->as<Expr::Apply>();
  ASSERT_NE(app, nullptr);
  EXPECT_NE(app->fn->as<Expr::PrimRef>(), nullptr);
}

TEST(Reader, FacetArityIsChecked) {
  try {
    parse_program("(facet l 1)");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.loc().line, 1u);
    EXPECT_EQ(e.loc().column, 1u);
  }
  EXPECT_THROW(parse_program("(obs l 1)"), SyntaxError);
  EXPECT_THROW(parse_program("(let-label l (lambda (x) x))"), SyntaxError);
  EXPECT_THROW(parse_program("(box)"), SyntaxError);
  EXPECT_THROW(parse_program("(set! x)"), SyntaxError);
}

TEST(Reader, UnbalancedParensReportLocation) {
  try {
    parse_program("(define x 1)\n  (car (cons 1 2)");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.loc().line, 2u);
    EXPECT_EQ(e.loc().column, 3u);
  }
  EXPECT_THROW(parse_program("1)"), SyntaxError);
  EXPECT_THROW(parse_program("(1]"), SyntaxError);
}

TEST(Reader, DuplicateParamsAndDefinitions) {
  EXPECT_THROW(parse_program("(lambda (x x) x)"), SyntaxError);
  EXPECT_THROW(parse_program("(define (f a a) a)"), SyntaxError);
  EXPECT_THROW(parse_program("(let ([a 1] [a 2]) a)"), SyntaxError);
  EXPECT_THROW(parse_program("(define a 1) (define a 2)"), SyntaxError);
}

TEST(Reader, StarForms) {
  EXPECT_NE(only_expr(parse_program("(star)")).as<Expr::StarLit>(), nullptr);
  EXPECT_NE(only_expr(parse_program("(★)")).as<Expr::StarLit>(), nullptr);
  EXPECT_NE(only_expr(parse_program("#star")).as<Expr::StarLit>(), nullptr);
}

TEST(Reader, Booleans) {
  for (const char* t : {"true", "#t"}) EXPECT_TRUE(only_expr(parse_program(t)).as<Expr::Const>()->value.as_bool());
  for (const char* f : {"false", "#f"}) EXPECT_FALSE(only_expr(parse_program(f)).as<Expr::Const>()->value.as_bool());
}

TEST(Reader, LetDesugarsLocally) {
  Program a = parse_program("(let ([x (+ 1 2)]) (car x))");
  Program b = parse_program("((lambda (x) (car x)) (+ 1 2))");
  EXPECT_TRUE(same_program(a, b));
}

TEST(Reader, LetStarNests) {
  Program a = parse_program("(let* ([a 1] [b a]) b)");
  Program b = parse_program("((lambda (a) ((lambda (b) b) a)) 1)");
  EXPECT_TRUE(same_program(a, b));
}

TEST(Reader, AndOrDesugarToIf) {
  Program a = parse_program("(and x y)");
  Program b = parse_program("(if x y false)");
  EXPECT_TRUE(same_program(a, b));
  const Expr& e = only_expr(parse_program("(or x y)"));
  auto* app = e.as<Expr::Apply>();
  ASSERT_NE(app, nullptr);
  auto* lam = app->fn->as<Expr::Lambda>();
  ASSERT_NE(lam, nullptr);
  EXPECT_NE(lam->body->as<Expr::If>(), nullptr);
}

TEST(Reader, ShadowedPrimitiveIsAVariable) {
  const Expr& e = only_expr(parse_program("(lambda (car) (car 1))"));
  auto* app = e.as<Expr::Lambda>()->body->as<Expr::Apply>();
  EXPECT_NE(app->fn->as<Expr::Var>(), nullptr);
  Program p = parse_program("(define (list x) x) (list 1)");
  EXPECT_NE(p.forms[1].expr->as<Expr::Apply>()->fn->as<Expr::Var>(), nullptr);
}

TEST(Reader, CommentsStringsAndQuotedLists) {
  Program p = parse_program("; a comment\n\"player1\" ; trailing\n'(1 2 3)");
  ASSERT_EQ(p.forms.size(), 2u);
  EXPECT_EQ(p.forms[0].expr->as<Expr::Const>()->value.as_string(), "player1");
  EXPECT_EQ(print(p.forms[1].expr->as<Expr::Const>()->value), "(1 2 3)");
}

TEST(Reader, DefineOnlyAtToplevel) {
  EXPECT_THROW(parse_program("(lambda (x) (define y 1) y)"), SyntaxError);
}

TEST(Reader, SitesAreUniqueAndIncreasing) {
  Program p = parse_program("(let-label a (lambda (x) x) (let-label b (lambda (x) x) b))");
  auto* outer = p.forms[0].expr->as<Expr::LetLabel>();
  auto* inner = outer->body->as<Expr::LetLabel>();
  EXPECT_LT(outer->site, inner->site);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(ReaderProperty, PrintReparseRoundTripOverCorpus) {
  std::size_t seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(FEXEC_CORPUS_DIR)) {
    if (entry.path().extension() != ".rkts") continue;
    ++seen;
    Program p = parse_program(read_file(entry.path()));
    std::string printed = to_source(p);
    Program q = parse_program(printed);
    EXPECT_TRUE(same_program(p, q)) << entry.path() << "\n" << printed;
    EXPECT_EQ(to_source(q), printed);
  }
  EXPECT_GE(seen, 25u);
}

}  // namespace
}  // namespace fexec
