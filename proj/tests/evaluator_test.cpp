#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "fexec/evaluator.hpp"
#include "fexec/reader.hpp"

namespace fexec {
namespace {

struct RunResult {
  std::vector<std::string> values;
  std::string output;
  std::vector<std::string> trace;
};

RunResult run(const std::string& src, bool trace = false) {
  Interpreter interp;
  std::ostringstream out;
  interp.set_output(&out);
  RunResult r;
  if (trace) interp.set_trace([&](const std::string& line) { r.trace.push_back(line); });
  for (const auto& v : interp.run(parse_program(src))) r.values.push_back(print(v));
  r.output = out.str();
  return r;
}

std::string last(const std::string& src) {
  RunResult r = run(src);
  EXPECT_FALSE(r.values.empty());
  return r.values.empty() ? "" : r.values.back();
}

constexpr const char* kLabelA = "(define a (let-label a (lambda (x) (= x 1)) a))\n";
constexpr const char* kLabelB = "(define b (let-label b (lambda (x) (= x 2)) b))\n";

// --- expression rules ------------------------------------------------------

TEST(Eval, BoxUnderEmptyPcStoresPlainValue) {
  Interpreter interp;
  Value addr = interp.eval(*parse_program("(box 0)").forms[0].expr, interp.globals(), PC{});
  EXPECT_EQ(print(interp.store().at(addr.as_address())), "0");
}

TEST(Eval, BoxUnderPositivePcStoresFacetWithStarDefault) {
  Interpreter interp;
  Program p = parse_program(std::string(kLabelA) + "(box 0)");
  interp.run_form(p.forms[0]);
  LabelId a = lookup(interp.globals(), "a", {}).as_label();
  Value addr = interp.eval(*p.forms[1].expr, interp.globals(), PC{}.extend(Branch::pos(a)));
  EXPECT_EQ(print(interp.store().at(addr.as_address())), "#facet<a ? 0 : #star>");
}

TEST(Eval, BoxLaunderingProgramFollowsTheRules) {
  EXPECT_EQ(last(std::string("(define alice (let-label alice (lambda (x) (= x 1)) alice))\n") +
                 "(define x (box 0))\n"
                 "(if (= (facet alice 0 1) 0)\n"
                 "  (set! x 0)\n"
                 "  (set! x 1))\n"
                 "(unbox x)"),
            "#facet<alice ? 0 : 1>");
}

TEST(Eval, SetReturnsWrittenValue) { EXPECT_EQ(last("(define b (box 1)) (set! b 5)"), "5"); }

TEST(Eval, UnboxOfNonBoxIsTypeError) { EXPECT_THROW(run("(unbox 3)"), TypeError); }

TEST(Eval, UnboundVariableCarriesLocation) {
  try {
    run("1\n (car nope)");
    FAIL();
  } catch (const UnboundVariable& e) {
    EXPECT_EQ(e.loc().line, 2u);
  }
}

TEST(Eval, BeginReturnsLast) { EXPECT_EQ(last("(begin 1 2 3)"), "3"); }

TEST(Eval, RecursiveDefine) {
  EXPECT_EQ(last("(define (len l) (if (null? l) 0 (+ 1 (len (cdr l))))) (len '(1 2 3))"), "3");
}

// --- application ---------------------------------------------------------------

TEST(Apply, FacetedFunctionDistributes) {
  EXPECT_EQ(last("(define Alice (let-label Alice (lambda (x) (= x 1)) Alice))\n"
                 "((facet Alice (lambda (x) true) not) true)"),
            "#facet<Alice ? true : false>");
}

TEST(Apply, StarApplicationIsStar) {
  Interpreter interp;
  EXPECT_TRUE(interp.apply(Value::star(), {Value::integer(5)}, PC{}).is_star());
  EXPECT_EQ(last("((star) 5)"), "#star");
}

TEST(Apply, PositivePcNeverRunsNegativeFunction) {
  // g would flip the sentinel; under +a only f may run.
  EXPECT_EQ(last(std::string(kLabelA) +
                 "(define sentinel (box 0))\n"
                 "(define h (facet a (lambda (v) v) (lambda (v) (set! sentinel 1))))\n"
                 "(facet a (h 7) 0)\n"
                 "(unbox sentinel)"),
            "0");
}

TEST(Apply, ArityAndNonProcedure) {
  EXPECT_THROW(run("((lambda (x y) x) 1)"), ArityError);
  EXPECT_THROW(run("(5 1)"), TypeError);
  EXPECT_THROW(run("(car 1 2)"), ArityError);
}

TEST(Apply, MultiArgumentLambda) { EXPECT_EQ(last("((lambda (x y) (+ x y)) 2 3)"), "5"); }

// --- facet creation --------------------------------------------------------------

TEST(FacetCreate, SplitUnderEmptyPc) { EXPECT_EQ(last(std::string(kLabelA) + "(facet a 1 0)"), "#facet<a ? 1 : 0>"); }

TEST(FacetCreate, PositivePcSkipsNegativeExpression) {
  EXPECT_EQ(last(std::string(kLabelA) + "(facet a (facet a true (error \"forced\")) false)"),
            "#facet<a ? true : false>");
}

TEST(FacetCreate, NegativePcSkipsPositiveExpression) {
  EXPECT_EQ(last(std::string(kLabelA) + "(facet a false (facet a (error \"forced\") 9))"),
            "#facet<a ? false : 9>");
}

TEST(FacetCreate, NonLabelIsTypeError) {
  EXPECT_THROW(run("(facet 1 2 3)"), TypeError);
  EXPECT_THROW(run(std::string(kLabelA) + kLabelB + "(facet (facet a a b) 1 2)"), TypeError);
}

TEST(FacetCreate, NestedOrderIsCanonical) {
  // Inner label created first, so it ends up at the root.
  EXPECT_EQ(last(std::string(kLabelA) + kLabelB + "(facet b (facet a 1 2) 3)"),
            "#facet<a ? #facet<b ? 1 : 3> : #facet<b ? 2 : 3>>");
}

// --- let-label -----------------------------------------------------------------

TEST(LetLabel, ReturnsLabel) { EXPECT_EQ(last("(let-label l (lambda (x) (= 1 x)) l)"), "#label:l"); }

TEST(LetLabel, SequentialLabelsHaveIncreasingOrdinals) {
  Interpreter interp;
  auto vs = interp.run(parse_program("(let-label l (lambda (x) x) l) (let-label l (lambda (x) x) l)"));
  ASSERT_EQ(vs.size(), 2u);
  EXPECT_LT(vs[0].as_label().ordinal, vs[1].as_label().ordinal);
  EXPECT_NE(vs[0].as_label(), vs[1].as_label());
}

TEST(LetLabel, PolicyMustBeClosure) { EXPECT_THROW(run("(let-label l 5 l)"), TypeError); }

TEST(LetLabel, ShadowingDoesNotReplaceOriginalPolicy) {
  EXPECT_EQ(last("(define alice 1)\n"
                 "(define alice-label (let-label l (lambda (x) (= x alice)) l))\n"
                 "(define x (facet alice-label 1 0))\n"
                 "(let ([alice-label (let-label l (lambda (x) true) l)])\n"
                 "  (obs alice-label 1 x))"),
            "#facet<l ? 1 : 0>");
}

// --- obs -------------------------------------------------------------------------

constexpr const char* kAliceBoard =
    "(define (makeboard) '())\n"
    "(define (add-piece board x y) (cons (cons x y) board))\n"
    "(define alice-label (let-label l (lambda (x) (= 1 x)) l))\n"
    "(define alice-board (facet alice-label (add-piece (add-piece (makeboard) 3 4) 1 2) (star)))\n";

TEST(Obs, OwnerKeySeesBoard) {
  EXPECT_EQ(last(std::string(kAliceBoard) + "(obs alice-label 1 alice-board)"), "((1 . 2) (3 . 4))");
}

TEST(Obs, OtherKeySeesStar) { EXPECT_EQ(last(std::string(kAliceBoard) + "(obs alice-label 2 alice-board)"), "#star"); }

TEST(Obs, UnfacetedValuePassesThrough) { EXPECT_EQ(last(std::string(kLabelA) + "(obs a 2 42)"), "42"); }

TEST(Obs, FacetedDecisionIsPolicyError) {
  EXPECT_THROW(run(std::string(kLabelA) +
                   "(define c (let-label c (lambda (k) (facet a true false)) c))\n"
                   "(obs c 1 (facet c 1 2))"),
               PolicyError);
}

TEST(Obs, TruthyNonBooleanDecisionGrants) {
  EXPECT_EQ(last("(define c (let-label c (lambda (k) 0) c)) (obs c 1 (facet c 1 2))"), "1");
}

// --- if ------------------------------------------------------------------------------

TEST(If, FacetedConditionSplits) { EXPECT_EQ(last(std::string(kLabelA) + "(if (facet a true false) 1 2)"), "#facet<a ? 1 : 2>"); }

TEST(If, PlainAndStar) {
  EXPECT_EQ(last("(if true 1 2)"), "1");
  EXPECT_EQ(last("(if 0 1 2)"), "1");
  EXPECT_EQ(last("(if false 1 2)"), "2");
  EXPECT_EQ(last("(if (star) 1 (error \"x\"))"), "#star");
}

// --- primitives ------------------------------------------------------------------------

TEST(Prim, EqualityDistributesOverFacet) {
  EXPECT_EQ(last(std::string(kLabelA) + "(= (facet a 1 0) 0)"), "#facet<a ? false : true>");
}

TEST(Prim, Basics) {
  EXPECT_EQ(last("(car (cons 1 2))"), "1");
  EXPECT_EQ(last("(+ 1 #star)"), "#star");
  EXPECT_EQ(last("(list 1 2 (- 5 7))"), "(1 2 -2)");
  EXPECT_EQ(last("(null? '())"), "true");
  EXPECT_EQ(last("(pair? '())"), "false");
  EXPECT_EQ(last("(= \"player1\" \"player1\")"), "true");
  EXPECT_EQ(last("(* 6 7)"), "42");
  EXPECT_EQ(last("(< 1 2)"), "true");
  EXPECT_THROW(run("(car '())"), TypeError);
  EXPECT_THROW(run("(+ 1 true)"), TypeError);
}

TEST(Prim, TwoLabelsSplitOnSmallerFirst) {
  EXPECT_EQ(last(std::string(kLabelA) + kLabelB + "(+ (facet b 10 20) (facet a 1 2))"),
            "#facet<a ? #facet<b ? 11 : 21> : #facet<b ? 12 : 22>>");
}

TEST(Prim, DisplayRejectsFacetsAndStar) {
  EXPECT_EQ(run("(display \"hi\")").output, "hi");
  EXPECT_TRUE(run("(display 1)").values.back() == "#void");
  EXPECT_THROW(run(std::string(kLabelA) + "(display (facet a 1 2))"), FacetEscape);
  EXPECT_THROW(run("(display (star))"), StarObserved);
  EXPECT_THROW(run(std::string(kLabelA) + "(facet a (display 1) 2)"), FacetEscape);
}

TEST(Prim, ErrorHidesFacets) {
  try {
    run(std::string(kLabelA) + "(error \"bad\" (facet a 1 2))");
    FAIL();
  } catch (const UserError& e) {
    EXPECT_NE(std::string(e.message()).find("#<faceted>"), std::string::npos);
    EXPECT_EQ(std::string(e.message()).find("#facet"), std::string::npos);
  }
}

// --- laziness sentinels ----------------------------------------------------------------

// Each case: a program whose unselected side would set the sentinel to 1.
const char* const kLazinessCases[] = {
    // Fac-Create-Pos
    "(facet a (facet a 0 (set! s 1)) 0)",
    // Fac-Create-Neg
    "(facet a 0 (facet a (set! s 1) 0))",
    // App-Facet-Pos
    "(facet a ((facet a (lambda (v) v) (lambda (v) (set! s 1))) 0) 0)",
    // App-Facet-Neg
    "(facet a 0 ((facet a (lambda (v) (set! s 1)) (lambda (v) v)) 0))",
    // If-Pos
    "(facet a (if (facet a true false) 0 (set! s 1)) 0)",
    // If-Neg
    "(facet a 0 (if (facet a true false) (set! s 1) 0))",
    // plain if
    "(if true 0 (set! s 1))",
    // If-Star
    "(if (star) (set! s 1) (set! s 1))",
};

TEST(Laziness, UnselectedSideNeverRuns) {
  for (const char* body : kLazinessCases) {
    EXPECT_EQ(last(std::string(kLabelA) + "(define s (box 0))\n" + body + "\n(unbox s)"), "0") << body;
  }
}

// --- whole-run properties ------------------------------------------------------------

TEST(Threading, PositiveBranchEffectsHappenFirst) {
  // Both branches append to the same log box; the trace shows the order.
  std::string src = std::string(kLabelA) +
                    "(define log (box '()))\n"
                    "(facet a (set! log (cons 1 (unbox log))) (set! log (cons 2 (unbox log))))\n"
                    "(unbox log)";
  EXPECT_EQ(last(src), "#facet<a ? (1) : (2)>");
  RunResult r = run(src, true);
  std::size_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    if (r.trace[i].rfind("Set {+a}", 0) == 0 && !pos) pos = i + 1;
    if (r.trace[i].rfind("Set {-a}", 0) == 0 && !neg) neg = i + 1;
  }
  ASSERT_TRUE(pos && neg);
  EXPECT_LT(pos, neg);
}

TEST(Threading, NegativeBranchDoesNotSeePositiveWrite) {
  // Writes under +a are invisible under -a, so the negative read sees the
  // original value even though it runs second.
  EXPECT_EQ(last(std::string(kLabelA) +
                 "(define c (box 10))\n"
                 "(facet a (set! c 11) (unbox c))"),
            "#facet<a ? 11 : 10>");
}

TEST(Trace, RuleLinesAndNoEffectOnResults) {
  std::string src = std::string(kLabelA) + "(facet a 1 0)";
  RunResult plain = run(src);
  RunResult traced = run(src, true);
  EXPECT_EQ(plain.values, traced.values);
  EXPECT_NE(std::find(traced.trace.begin(), traced.trace.end(), "Fac-Create-Split {} #facet<a ? 1 : 0>"),
            traced.trace.end());
  EXPECT_NE(std::find(traced.trace.begin(), traced.trace.end(), "Const {+a} 1"), traced.trace.end());
}

TEST(Determinism, SameProgramSameOutputAndTrace) {
  std::string src = std::string(kAliceBoard) + kLabelA + "(define q (box 0)) (set! q (facet a 1 (obs alice-label 1 alice-board))) (unbox q)";
  RunResult x = run(src, true), y = run(src, true);
  EXPECT_EQ(x.values, y.values);
  EXPECT_EQ(x.trace, y.trace);
}

TEST(Consistency, DeeplyNestedFacetsNeverBuildContradictoryPc) {
  std::string src = std::string(kLabelA) + kLabelB +
                    "(define c (box 0))\n"
                    "(define (f v) (if (facet a v (facet b true v)) (set! c (facet b (+ (unbox c) 1) 7)) (unbox c)))\n"
                    "(facet a (f (facet b true false)) (f (facet a false (facet b false true))))\n"
                    "((facet b f f) (facet a true false))\n"
                    "(unbox c)";
  EXPECT_NO_THROW(run(src));
}

}  // namespace
}  // namespace fexec
