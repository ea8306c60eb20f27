#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fexec/oracle.hpp"
#include "fexec/reader.hpp"
#include "support/program_gen.hpp"

namespace fexec {
namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::filesystem::path> corpus_files() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(FEXEC_CORPUS_DIR))
    if (e.path().extension() == ".rkts") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

View view_of(std::initializer_list<std::pair<std::uint32_t, bool>> xs) {
  View v;
  for (auto [s, b] : xs) v.sees[s] = b;
  return v;
}

LabelId site_label(std::uint64_t ordinal, std::string name, std::uint32_t site) {
  return LabelId{ordinal, std::move(name), site};
}

// --- project-value ---------------------------------------------------------------

TEST(ProjectValue, Examples) {
  LabelId A = site_label(1, "A", 1);
  EXPECT_EQ(print(project_value(Value::facet(A, Value::integer(1), Value::integer(0)), view_of({{1, true}}))), "1");
  LabelId fam = site_label(1, "Family", 1), fr = site_label(2, "Friends", 2);
  Value profile = Value::facet(fam, Value::string("p1"),
                               Value::facet(fr, Value::string("p2"), Value::string("p3")));
  EXPECT_EQ(print(project_value(profile, view_of({{1, false}, {2, true}}))), "\"p2\"");
  EXPECT_EQ(print(project_value(Value::integer(42), View{})), "42");
}

TEST(ProjectValue, PartialViewIsMissingLabel) {
  LabelId A = site_label(1, "A", 1);
  EXPECT_THROW(project_value(Value::facet(A, Value::integer(1), Value::integer(0)), View{}), MissingLabel);
}

// --- project-program -------------------------------------------------------------

constexpr const char* kApplication =
    "(define Alice (let-label Alice (lambda (x) (= x 1)) Alice))\n"
    "((facet Alice (lambda (x) true) not) true)";

constexpr const char* kBoxLaundering =
    "(define alice (let-label alice (lambda (x) (= x 1)) alice))\n"
    "(define x (box 0))\n"
    "(if (= (facet alice 0 1) 0)\n"
    "  (set! x 0)\n"
    "  (set! x 1))\n"
    "(unbox x)";

TEST(ProjectProgram, ApplicationUnderPositiveView) {
  Program p = parse_program(kApplication);
  OracleInfo info = analyze_program(p);
  ASSERT_EQ(info.sites.size(), 1u);
  Program projected = project_program(p, view_of({{info.sites[0], true}}));
  Program want = parse_program(
      "(define Alice (let-label Alice (lambda (x) (= x 1)) Alice))\n"
      "((lambda (x) true) true)");
  EXPECT_TRUE(same_program(projected, want)) << to_source(projected);
  EXPECT_EQ(standard_eval(projected), "true\n");
}

TEST(ProjectProgram, BoxProgramUnderNegativeView) {
  Program p = parse_program(kBoxLaundering);
  Program projected = project_program(p, view_of({{analyze_program(p).sites[0], false}}));
  EXPECT_EQ(standard_eval(projected), "1\n1\n");
}

TEST(ProjectProgram, DynamicLabelIsNotOracleSafe) {
  EXPECT_THROW(analyze_program(parse_program(
                   "(define a (let-label a (lambda (x) x) a))\n"
                   "(define b (let-label b (lambda (x) x) b))\n"
                   "(facet (if true a b) 1 2)")),
               NotOracleSafe);
  EXPECT_THROW(analyze_program(parse_program("(define (mk) (let-label l (lambda (x) x) l))")), NotOracleSafe);
  EXPECT_THROW(analyze_program(parse_program(
                   "(define a (let-label a (lambda (x) x) a))\n"
                   "(define c (box 0))\n"
                   "(obs a 1 (set! c 1))")),
               NotOracleSafe);
}

TEST(ProjectProgram, LabelAliasesResolve) {
  EXPECT_NO_THROW(analyze_program(parse_program(
      "(define a (let-label a (lambda (x) x) a))\n"
      "(define a2 a)\n"
      "(let ([l a2]) (facet l 1 2))")));
}

// --- standard-eval -----------------------------------------------------------------

constexpr const char* kMarkHit =
    "(define (mark-hit board x y)\n"
    "  (if (null? board)\n"
    "      (cons board false)\n"
    "      (let* ([fst (car board)]\n"
    "             [rst (cdr board)])\n"
    "        (if (and (= (car fst) x)\n"
    "                 (= (cdr fst) y))\n"
    "            (cons rst true)\n"
    "            (let ([rst+b (mark-hit rst x y)])\n"
    "              (cons (cons fst\n"
    "                          (car rst+b))\n"
    "                    (cdr rst+b)))))))\n";

TEST(StandardEval, Examples) {
  EXPECT_EQ(standard_eval(parse_program("((lambda (x) x) 7)")), "7\n");
  EXPECT_EQ(standard_eval(parse_program(std::string(kMarkHit) + "(mark-hit '((1 . 2) (3 . 4)) 3 4)")),
            "(((1 . 2)) . true)\n");
  EXPECT_EQ(standard_eval(parse_program(std::string(kMarkHit) + "(mark-hit '((1 . 2) (3 . 4)) 9 9)")),
            "(((1 . 2) (3 . 4)) . false)\n");
}

TEST(StandardEval, StarAndErrors) {
  EXPECT_EQ(standard_eval(parse_program("(+ 1 (star))")), "#star\n");
  EXPECT_EQ(standard_eval(parse_program("(car 1)")), "error: TypeError\n");
  EXPECT_THROW(StandardEvaluator().run(parse_program("(define a (let-label a (lambda (x) x) a)) (facet a 1 2)")),
               TypeError);
}

// --- check-projection-equivalence ------------------------------------------------------

TEST(Oracle, ApplicationPassesWithTwoViews) {
  OracleReport r = check_projection_equivalence(parse_program(kApplication), "application");
  EXPECT_TRUE(r.pass) << r.text();
  EXPECT_EQ(r.views.size(), 2u);
}

TEST(Oracle, BoxLaunderingProjectsToEachCopy) {
  OracleReport r = check_projection_equivalence(parse_program(kBoxLaundering), "box");
  ASSERT_TRUE(r.pass) << r.text();
  ASSERT_EQ(r.views.size(), 2u);
  EXPECT_EQ(r.views[0].standard, "0\n0\n");  // alice sees the true branch
  EXPECT_EQ(r.views[1].standard, "1\n1\n");
}

TEST(Oracle, ShadowingPassesUnderOuterViews) {
  OracleReport r = check_projection_equivalence(
      parse_program("(define alice 1)\n"
                    "(define alice-label (let-label l (lambda (x) (= x alice)) l))\n"
                    "(define x (facet alice-label 1 0))\n"
                    "(let ([alice-label (let-label l (lambda (x) true) l)])\n"
                    "  (obs alice-label 1 x))"),
      "shadowing");
  EXPECT_TRUE(r.pass) << r.text();
  EXPECT_EQ(r.labels, 2u);
}

TEST(Oracle, TooManyLabels) {
  std::string src;
  for (int i = 0; i < 4; ++i) src += "(let-label l" + std::to_string(i) + " (lambda (x) x) 0)\n";
  EXPECT_THROW(check_projection_equivalence(parse_program(src)), NotOracleSafe);
  OracleOptions opts;
  opts.max_labels = 4;
  EXPECT_EQ(check_projection_equivalence(parse_program(src), "four", opts).views.size(), 16u);
}

TEST(Oracle, ReportRendering) {
  OracleReport r = check_projection_equivalence(parse_program(kApplication), "app");
  EXPECT_EQ(r.text().substr(0, 28), "PASS app (1 label, 2 views)\n");
  auto j = r.json();
  EXPECT_EQ(j["program"], "app");
  EXPECT_EQ(j["k"], 1);
  EXPECT_EQ(j["views"].size(), 2u);
}

TEST(Oracle, RawWritesAreCaught) {
  OracleOptions opts;
  opts.faceted.raw_set_writes = true;
  OracleReport r = check_projection_equivalence(parse_program(kBoxLaundering), "box", opts);
  EXPECT_FALSE(r.pass);
  ASSERT_NE(r.first_failure(), nullptr);
}

TEST(OracleCorpus, EveryProgramPasses) {
  auto files = corpus_files();
  EXPECT_GE(files.size(), 25u);
  for (const auto& f : files) {
    Program p = parse_program(read_file(f));
    OracleReport r = check_projection_equivalence(p, f.filename().string());
    EXPECT_TRUE(r.pass) << r.text();
    EXPECT_LE(r.labels, 3u);
  }
}

// --- randomized oracle -------------------------------------------------------------------

bool fails(const std::string& src) {
  try {
    return !check_projection_equivalence(parse_program(src)).pass;
  } catch (const Error&) {
    return false;
  }
}

TEST(OracleRandom, GeneratedProgramsAgreeInEveryView) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    testing::ProgramGen gen(seed);
    auto forms = gen.program();
    std::string src = testing::render(forms);
    OracleReport r = check_projection_equivalence(parse_program(src), "seed-" + std::to_string(seed));
    ++checked;
    if (!r.pass) {
      auto small = testing::shrink(forms, fails);
      std::string shrunk = testing::render(small);
      std::ofstream(std::string(FEXEC_ARTIFACT_DIR) + "/counterexample-" + std::to_string(seed) + ".rkts") << shrunk;
      ADD_FAILURE() << r.text() << "shrunk:\n" << shrunk;
    }
  }
  EXPECT_EQ(checked, 1000);
}

TEST(OracleRandom, ShrinkerReducesAFailingProgram) {
  // Under raw set! writes the laundering pattern fails; the shrinker must keep
  // it failing while removing the noise.
  auto raw_fails = [](const std::string& src) {
    OracleOptions opts;
    opts.faceted.raw_set_writes = true;
    try {
      return !check_projection_equivalence(parse_program(src), "x", opts).pass;
    } catch (const Error&) {
      return false;
    }
  };
  std::vector<testing::Sx> forms = {
      testing::atom("(define l1 (let-label l1 (lambda (k) (= k 1)) l1))"),
      testing::atom("(define b1 (box 0))"),
      testing::atom("(+ 1 2)", testing::Sx::Int),
      testing::list(testing::Sx::Int,
                    {testing::atom("facet"), testing::atom("l1"),
                     testing::list(testing::Sx::Int, {testing::atom("set!"), testing::atom("b1"),
                                                      testing::list(testing::Sx::Int, {testing::atom("+"),
                                                                                       testing::atom("3", testing::Sx::Int),
                                                                                       testing::atom("4", testing::Sx::Int)})}),
                     testing::atom("0", testing::Sx::Int)}),
      testing::list(testing::Sx::Int, {testing::atom("unbox"), testing::atom("b1")}),
  };
  ASSERT_TRUE(raw_fails(testing::render(forms)));
  auto small = testing::shrink(forms, raw_fails);
  EXPECT_TRUE(raw_fails(testing::render(small)));
  EXPECT_LT(testing::render(small).size(), testing::render(forms).size());
}

}  // namespace
}  // namespace fexec
