#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "saga/annotation.hpp"
#include "saga/engine.hpp"
#include "saga/errors.hpp"
#include "saga/frontend.hpp"
#include "saga/sable.hpp"
#include "saga/scfg.hpp"

using namespace saga;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Scfg buildFrom(const std::string& source, const std::string& qualifier) {
    return buildScfg(parseProcedure(source, qualifier));
}

AspectValue intSet(std::initializer_list<std::int64_t> xs) {
    AspectValue::SetRep rep;
    for (auto x : xs) rep.insert(AspectValue::integer(x));
    return AspectValue::set(std::move(rep));
}

// Collects assigned names; converges on loops because sets only grow.
const char* kDefTracker =
    "traversal travDefs:\n"
    "    aspect Defs aspectType set\n"
    "    pointcut(EnterProcedure, inputs):\n"
    "        Defs = set()\n"
    "    pointcut(Assign, left, right):\n"
    "        Defs = Defs | getExprSymbs('def', left)\n";

StateId findLabel(const Scfg& g, StatementLabel label) {
    for (StateId id = 0; id < g.stateCount(); ++id)
        if (g.live(id) && !g.state(id).ending && g.state(id).label == label)
            return id;
    return -1;
}

}  // namespace

TEST_CASE("the modular exponentiation example raises the published alarms") {
    std::string dir = SAGA_ASSET_DIR "/fixtures/running_example/";
    Scfg g = buildFrom(slurp(dir + "source_code.py"),
                       "source_code.py:runningExample");
    SableProgram prog =
        parseSable(slurp(SAGA_ASSET_DIR "/library/running_example.sable"));
    LabeledSymbols ann =
        annotationFor(parseSourceAnnotation(slurp(dir + "annotation.json")),
                      "source_code.py:runningExample");

    Analyzer analyzer(g, prog, ann);
    AnalysisResult res = analyzer.run();

    REQUIRE(res.alarms.size() == 3);
    CHECK(res.alarms[0].step == 8);
    CHECK(res.alarms[0].line == 9);
    CHECK(res.alarms[0].traversal == "travSensitive");
    CHECK(res.alarms[0].aspect == "SensitiveBranching");
    CHECK(res.alarms[0].value == AspectValue::boolean(true));
    CHECK(res.alarms[1].step == 14);
    CHECK(res.alarms[1].line == 9);
    CHECK(res.alarms[1].aspect == "SensitiveBranching");
    CHECK(res.alarms[2].step == 35);
    CHECK(res.alarms[2].line == 13);
    CHECK(res.alarms[2].traversal == "travConfidentiality");
    CHECK(res.alarms[2].aspect == "ConfidentialityViolation");
    CHECK(res.steps == 36);

    StateId loop = findLabel(g, StatementLabel::For);
    REQUIRE(loop >= 0);
    REQUIRE(res.stats.size() == 2);
    CHECK(res.stats[0].name == "travSensitive");
    CHECK(res.stats[0].loopBodyRuns.at(loop) == 2);
    CHECK(res.stats[1].name == "travConfidentiality");
    CHECK(res.stats[1].loopBodyRuns.at(loop) == 1);

    // Re-running resets all per-run state.
    AnalysisResult again = analyzer.run();
    CHECK(again.alarms.size() == 3);
    CHECK(again.steps == 36);
    CHECK(again.alarms[0].step == 8);
}

TEST_CASE("default merge ors booleans, unions sets and copies the rest") {
    TravMap left{{"B", AspectValue::boolean(false)},
                 {"S", intSet({1})},
                 {"I", AspectValue::integer(7)},
                 {"OnlyLeft", AspectValue::str("l")}};
    TravMap right{{"B", AspectValue::boolean(true)},
                  {"S", intSet({2})},
                  {"I", AspectValue::integer(7)},
                  {"OnlyRight", intSet({9})}};
    TravMap out = mergeDefault(left, right);
    CHECK(out.at("B") == AspectValue::boolean(true));
    CHECK(out.at("S") == intSet({1, 2}));
    CHECK(out.at("I") == AspectValue::integer(7));
    CHECK(out.at("OnlyLeft") == AspectValue::str("l"));
    CHECK(out.at("OnlyRight") == intSet({9}));

    // The result owns its structure.
    out.at("OnlyRight").asSet().insert(AspectValue::integer(1));
    CHECK(right.at("OnlyRight") == intSet({9}));
    out.at("S").asSet().insert(AspectValue::integer(3));
    CHECK(left.at("S") == intSet({1}));
}

TEST_CASE("default merge refuses diverging scalar values") {
    TravMap left{{"I", AspectValue::integer(1)}};
    TravMap right{{"I", AspectValue::integer(2)}};
    CHECK_THROWS_WITH_AS(mergeDefault(left, right),
                         "Conflict of values: for non-Boolean, non-set "
                         "values, values for both traversal maps are expected "
                         "to be the same.",
                         EvalError);
    TravMap noneLeft{{"N", AspectValue::none()}};
    TravMap strRight{{"N", AspectValue::str("x")}};
    CHECK_THROWS_AS(mergeDefault(noneLeft, strRight), EvalError);
}

TEST_CASE("a fixpoint holds when the annotation subsumes the map") {
    AnnotationMap old{{"S", intSet({1, 2})}, {"B", AspectValue::boolean(true)}};
    CHECK(isFixpoint(old, TravMap{{"S", intSet({1, 2})}}));
    CHECK(isFixpoint(old, TravMap{}));
    CHECK(isFixpoint(old, TravMap{{"S", intSet({1, 2})},
                                  {"B", AspectValue::boolean(true)}}));
    CHECK_FALSE(isFixpoint(old, TravMap{{"S", intSet({1})}}));
    CHECK_FALSE(isFixpoint(old, TravMap{{"Missing", AspectValue::none()}}));
    CHECK_FALSE(isFixpoint(AnnotationMap{}, TravMap{{"S", intSet({})}}));
}

TEST_CASE("traversals run after the traversals they import from") {
    SableProgram fwd =
        parseSable(slurp(SAGA_ASSET_DIR "/library/running_example.sable"));
    auto order = orderTraversals(fwd);
    REQUIRE(order.size() == 2);
    CHECK(order[0]->name == "travSensitive");
    CHECK(order[1]->name == "travConfidentiality");

    SableProgram rev = parseSable(
        "traversal travB:\n"
        "    fromTraversal travA importAspect X\n"
        "    aspect Y aspectType bool\n"
        "    pointcut(Exp, expr):\n"
        "        Y = len(getAspect(currentPoint, X)) > 0\n"
        "\n"
        "traversal travA:\n"
        "    aspect X aspectType set\n"
        "    pointcut(Exp, expr):\n"
        "        X = X | getExprSymbs('use', expr)\n");
    auto revOrder = orderTraversals(rev);
    REQUIRE(revOrder.size() == 2);
    CHECK(revOrder[0]->name == "travA");
    CHECK(revOrder[1]->name == "travB");
}

TEST_CASE("import resolution failures are reported by name") {
    SableProgram missing = parseSable(
        "traversal travB:\n"
        "    fromTraversal travMissing importAspect X\n"
        "    aspect Y aspectType bool\n"
        "    pointcut(Exp, expr):\n"
        "        Y = False\n");
    CHECK_THROWS_WITH_AS(
        orderTraversals(missing),
        "traversal travB imports from unknown traversal 'travMissing'",
        ValidationError);

    SableProgram undeclared = parseSable(
        "traversal travA:\n"
        "    aspect X aspectType set\n"
        "    pointcut(Exp, expr):\n"
        "        X = X\n"
        "\n"
        "traversal travB:\n"
        "    fromTraversal travA importAspect Z\n"
        "    aspect Y aspectType bool\n"
        "    pointcut(Exp, expr):\n"
        "        Y = False\n");
    CHECK_THROWS_WITH_AS(
        orderTraversals(undeclared),
        "traversal travB imports aspect 'Z' which travA does not declare",
        ValidationError);

    SableProgram cyclic = parseSable(
        "traversal travA:\n"
        "    fromTraversal travB importAspect Y\n"
        "    aspect X aspectType bool\n"
        "    pointcut(Exp, expr):\n"
        "        X = False\n"
        "\n"
        "traversal travB:\n"
        "    fromTraversal travA importAspect X\n"
        "    aspect Y aspectType bool\n"
        "    pointcut(Exp, expr):\n"
        "        Y = False\n");
    CHECK_THROWS_WITH_AS(
        orderTraversals(cyclic),
        doctest::Contains("cyclic import dependencies between traversals"),
        ValidationError);
}

TEST_CASE("a growing set stabilizes a while loop in two body runs") {
    Scfg g = buildFrom(
        "def f(n):\n"
        "    while n > 0:\n"
        "        x = n\n",
        "s.py:f");
    SableProgram prog = parseSable(kDefTracker);
    Analyzer analyzer(g, prog, {});
    AnalysisResult res = analyzer.run();
    CHECK(res.alarms.empty());

    StateId loop = findLabel(g, StatementLabel::While);
    REQUIRE(loop >= 0);
    REQUIRE(res.stats.size() == 1);
    CHECK(res.stats[0].loopBodyRuns.at(loop) == 2);
    CHECK(g.state(g.end).annotation.at("Defs") == symbolSet({"x"}));
    // start, while, body, while, body, while, endwhile, end
    CHECK(res.steps == 8);
}

TEST_CASE("a map that never stabilizes hits the iteration bound") {
    Scfg g = buildFrom(
        "def f(n):\n"
        "    while n > 0:\n"
        "        x = 1\n",
        "s.py:f");
    SableProgram prog = parseSable(
        "traversal travDiverge:\n"
        "    aspect Count aspectType int\n"
        "    pointcut(EnterProcedure, inputs):\n"
        "        Count = 0\n"
        "    pointcut(Assign, left, right):\n"
        "        Count = Count + 1\n");
    EngineOptions opts;
    opts.maxLoopIters = 5;
    Analyzer analyzer(g, prog, {}, opts);
    CHECK_THROWS_WITH_AS(analyzer.run(),
                         "loop at line 2 did not reach a fixpoint within 5 "
                         "iterations (traversal travDiverge)",
                         EvalError);
}

TEST_CASE("a returning branch contributes nothing at the join") {
    Scfg g = buildFrom(
        "def f(a):\n"
        "    if a:\n"
        "        z = 3\n"
        "        return z\n"
        "    else:\n"
        "        x = 2\n"
        "    y = x\n",
        "s.py:f");
    SableProgram prog = parseSable(kDefTracker);
    Analyzer analyzer(g, prog, {});
    AnalysisResult res = analyzer.run();
    CHECK(res.alarms.empty());
    CHECK(g.state(g.end).annotation.at("Defs") == symbolSet({"x", "y"}));
}

TEST_CASE("both branches merge when both reach the join") {
    Scfg g = buildFrom(
        "def f(a):\n"
        "    if a:\n"
        "        x = 1\n"
        "    else:\n"
        "        y = 2\n"
        "    z = 3\n",
        "s.py:f");
    SableProgram prog = parseSable(kDefTracker);
    Analyzer analyzer(g, prog, {});
    analyzer.run();
    CHECK(g.state(g.end).annotation.at("Defs") ==
          symbolSet({"x", "y", "z"}));
}

TEST_CASE("an if without else keeps the fall-through map alive") {
    Scfg g = buildFrom(
        "def f(a):\n"
        "    if a:\n"
        "        x = 1\n"
        "    z = 3\n",
        "s.py:f");
    SableProgram prog = parseSable(kDefTracker);
    Analyzer analyzer(g, prog, {});
    analyzer.run();
    // The skip edge carries an unmodified copy into the join merge.
    CHECK(g.state(g.end).annotation.at("Defs") == symbolSet({"x", "z"}));
}

TEST_CASE("the analysis completes when every branch returns") {
    Scfg g = buildFrom(
        "def f(a):\n"
        "    if a:\n"
        "        return 1\n"
        "    else:\n"
        "        return 2\n",
        "s.py:f");
    SableProgram prog = parseSable(kDefTracker);
    Analyzer analyzer(g, prog, {});
    AnalysisResult res = analyzer.run();
    CHECK(res.alarms.empty());
    // start, if, both returns, end
    CHECK(res.steps == 5);
    CHECK(g.state(g.end).annotation.at("Defs") == AspectValue::set());
}

TEST_CASE("triggers record the step at which the value was reached") {
    Scfg g = buildFrom(
        "def f(secret):\n"
        "    a = secret\n"
        "    b = 1\n",
        "s.py:f");
    SableProgram prog = parseSable(
        "traversal travWatch:\n"
        "    sourceAnnotation labels\n"
        "    aspect Tainted aspectType bool\n"
        "    triggerFrom Tainted atValue True\n"
        "    pointcut(EnterProcedure, inputs):\n"
        "        Tainted = False\n"
        "    pointcut(Assign, left, right):\n"
        "        Tainted = len(getExprSymbs('use', right) & "
        "getDescrSymbs('watch', labels)) > 0\n");
    LabeledSymbols ann{{"watch", {"secret"}}};
    Analyzer analyzer(g, prog, ann);
    AnalysisResult res = analyzer.run();
    REQUIRE(res.alarms.size() == 1);
    CHECK(res.alarms[0].line == 2);
    CHECK(res.alarms[0].step == 2);  // start then the first assignment
    CHECK(res.alarms[0].aspect == "Tainted");
    CHECK(res.alarms[0].state == findLabel(g, StatementLabel::Assign));
}
