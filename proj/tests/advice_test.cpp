#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "saga/advice.hpp"
#include "saga/errors.hpp"
#include "saga/sable.hpp"

using namespace saga;

namespace {

// One traversal whose utilities expose the interpreter surface to the tests.
const char* kDefs = R"(traversal travT:

    sourceAnnotation ann
    aspect Flag aspectType bool
    aspect Bag aspectType set

    utility:
        def evalBranch(c):
            if c:
                val = {1}
            else:
                val = set()
            return val

        def bump(x):
            x = x + 1
            return x

        def spin(n):
            return spin(n)

        def orOp(a, b):
            return a | b

        def andOp(a, b):
            return a & b

        def subOp(a, b):
            return a - b

        def addOp(a, b):
            return a + b

        def less(a, b):
            return a < b

        def lessEq(a, b):
            return a <= b

        def truthy(x):
            if x:
                return True
            return False

        def notOp(x):
            return not x

        def negOp(x):
            return -x

        def has(x, c):
            return x in c

        def lacks(x, c):
            return x not in c

        def getItem(c, k):
            return c[k]

        def setItem(c, k, v):
            c[k] = v
            return c

        def augUnion(a, b):
            a |= b
            return a

        def popAt(l, i):
            return l.pop(i)

        def popLast(l):
            return l.pop()

        def keysOf(m):
            return m.keys()

        def pushed(l, x):
            l.append(x)
            return l

        def iterSum(c):
            total = 0
            for e in c:
                total = total + e
            return total

    pointcut(Assign, left, right):
        Flag = len(getExprSymbs('def', left) & getDescrSymbs('watch', ann)) > 0
        Bag = getExprSymbs('use', right)

    pointcut(Exp, expr):
        if enterLoop(currentPoint):
            stash = {1}
        Bag = deepcopy(stash)

    mergeAspects(m1, m2):
        return m1 | m2
)";

struct Fixture {
    SableProgram prog = parseSable(kDefs);
    AdviceRuntime rt{prog.traversals[0],
                     toValue({{"watch", {"x"}}, {"empty", {}}})};

    AspectValue call(const std::string& name, std::vector<AspectValue> args) {
        return rt.callFunction(name, std::move(args));
    }
};

AspectValue ints(std::initializer_list<std::int64_t> xs) {
    AspectValue::ListRep rep;
    for (auto x : xs) rep.push_back(AspectValue::integer(x));
    return AspectValue::list(std::move(rep));
}

AspectValue intSet(std::initializer_list<std::int64_t> xs) {
    AspectValue::SetRep rep;
    for (auto x : xs) rep.insert(AspectValue::integer(x));
    return AspectValue::set(std::move(rep));
}

}  // namespace

TEST_CASE("lists, maps and sets share structure until deep-copied") {
    AspectValue l = ints({1});
    AspectValue alias = l;
    alias.asList().push_back(AspectValue::integer(2));
    CHECK(l == ints({1, 2}));

    AspectValue m = AspectValue::map();
    AspectValue mAlias = m;
    mAlias.asMap()[AspectValue::str("k")] = AspectValue::integer(1);
    CHECK(m.asMap().size() == 1);

    AspectValue severed = l.deepCopy();
    severed.asList().push_back(AspectValue::integer(3));
    CHECK(l == ints({1, 2}));
    CHECK(severed == ints({1, 2, 3}));

    AspectValue nested = AspectValue::list({ints({1})});
    AspectValue deep = nested.deepCopy();
    deep.asList()[0].asList().push_back(AspectValue::integer(9));
    CHECK(nested.asList()[0] == ints({1}));
}

TEST_CASE("comparison is deep and totally ordered across kinds") {
    CHECK(AspectValue::integer(1).compare(AspectValue::integer(2)) < 0);
    CHECK(AspectValue::str("a").compare(AspectValue::str("b")) < 0);
    CHECK(ints({1, 2}) == ints({1, 2}));
    CHECK(ints({1, 2}).compare(ints({1, 3})) < 0);
    CHECK(ints({1}).compare(ints({1, 0})) < 0);

    // Kinds order None < Bool < Int < Str < Set < List < Map.
    std::vector<AspectValue> ladder = {
        AspectValue::none(),  AspectValue::boolean(false),
        AspectValue::integer(0), AspectValue::str(""),
        AspectValue::set(),   AspectValue::list(),
        AspectValue::map()};
    for (size_t i = 0; i + 1 < ladder.size(); ++i) {
        CHECK(ladder[i].compare(ladder[i + 1]) < 0);
        CHECK(ladder[i + 1].compare(ladder[i]) > 0);
    }
    CHECK(AspectValue::none() == AspectValue::none());
}

TEST_CASE("repr renders python literals") {
    CHECK(AspectValue::none().repr() == "None");
    CHECK(AspectValue::boolean(true).repr() == "True");
    CHECK(AspectValue::integer(-3).repr() == "-3");
    CHECK(AspectValue::str("text").repr() == "'text'");
    CHECK(intSet({2, 1}).repr() == "{1, 2}");
    CHECK(AspectValue::set().repr() == "set()");
    CHECK(AspectValue::list({AspectValue::integer(1), AspectValue::str("a")})
              .repr() == "[1, 'a']");
    CHECK(AspectValue::map().repr() == "{}");
    AspectValue::MapRep mr;
    mr[AspectValue::str("k")] = AspectValue::integer(1);
    CHECK(AspectValue::map(std::move(mr)).repr() == "{'k': 1}");
    CHECK(symbolSet({"b", "a"}).repr() == "{'a', 'b'}");
}

TEST_CASE("containers are unhashable, scalars are hashable") {
    CHECK(AspectValue::none().hashable());
    CHECK(AspectValue::boolean(true).hashable());
    CHECK(AspectValue::integer(1).hashable());
    CHECK(AspectValue::str("s").hashable());
    CHECK_FALSE(AspectValue::set().hashable());
    CHECK_FALSE(AspectValue::list().hashable());
    CHECK_FALSE(AspectValue::map().hashable());
}

TEST_CASE("typed accessors reject other kinds") {
    CHECK_THROWS_WITH_AS(AspectValue::integer(1).asStr(),
                         "expected str, got int", EvalError);
    CHECK_THROWS_WITH_AS(AspectValue::list().asMap(),
                         "expected dict, got list", EvalError);
}

TEST_CASE("getExprSymbs selects the requested symbol class") {
    ExprUsage e{{"x"}, {"a", "b"}, {"f"}};
    CHECK(getExprSymbs("def", e) == std::set<std::string>{"x"});
    CHECK(getExprSymbs("use", e) == std::set<std::string>{"a", "b"});
    CHECK(getExprSymbs("call", e) == std::set<std::string>{"f"});
    CHECK(getExprSymbs("all", e) == std::set<std::string>{"a", "b", "f", "x"});
    CHECK_THROWS_WITH_AS(getExprSymbs("defs", e),
                         "getExprSymbs label must be 'def', 'use', 'call' or "
                         "'all', got 'defs'",
                         EvalError);
}

TEST_CASE("getDescrSymbs requires the label to exist") {
    LabeledSymbols ann{{"check", {"verify"}}, {"empty", {}}};
    CHECK(getDescrSymbs("check", ann) == std::set<std::string>{"verify"});
    CHECK(getDescrSymbs("empty", ann).empty());
    CHECK_THROWS_WITH_AS(getDescrSymbs("nope", ann),
                         "source annotation has no label 'nope'", EvalError);
}

TEST_CASE("getAspect returns a severed copy of annotated values") {
    SymbolicState st;
    st.point = 4;
    st.annotation["Trace"] = ints({1});
    AspectValue got = getAspect(st, "Trace");
    got.asList().push_back(AspectValue::integer(2));
    CHECK(st.annotation["Trace"] == ints({1}));
    CHECK_THROWS_WITH_AS(getAspect(st, "Other"),
                         "no aspect 'Other' annotated at point 4", EvalError);

    st.enterLoop = true;
    CHECK(enterLoop(st));
}

TEST_CASE("toValue lifts an annotation entry into advice values") {
    AspectValue v = toValue({{"check", {"y", "x"}}, {"empty", {}}});
    CHECK(v.repr() == "{'check': {'x', 'y'}, 'empty': set()}");
}

TEST_CASE("a name assigned in a branch arm survives to the return") {
    Fixture f;
    CHECK(f.call("evalBranch", {AspectValue::boolean(true)}) == intSet({1}));
    CHECK(f.call("evalBranch", {AspectValue::boolean(false)}) ==
          AspectValue::set());
}

TEST_CASE("utility parameters are plain writable locals") {
    Fixture f;
    AspectValue arg = AspectValue::integer(41);
    CHECK(f.call("bump", {arg}) == AspectValue::integer(42));
    CHECK(arg == AspectValue::integer(41));
}

TEST_CASE("runaway recursion hits the call depth cap") {
    Fixture f;
    CHECK_THROWS_WITH_AS(f.call("spin", {AspectValue::integer(0)}),
                         doctest::Contains("utility call depth exceeded 64 in "
                                           "traversal travT"),
                         EvalError);
}

TEST_CASE("binary operators follow the value kinds") {
    Fixture f;
    CHECK(f.call("orOp", {AspectValue::boolean(false),
                          AspectValue::boolean(true)}) ==
          AspectValue::boolean(true));
    CHECK(f.call("andOp", {AspectValue::boolean(true),
                           AspectValue::boolean(false)}) ==
          AspectValue::boolean(false));
    CHECK(f.call("orOp", {AspectValue::integer(6), AspectValue::integer(9)}) ==
          AspectValue::integer(15));
    CHECK(f.call("andOp", {AspectValue::integer(6), AspectValue::integer(3)}) ==
          AspectValue::integer(2));
    CHECK(f.call("orOp", {intSet({1}), intSet({2})}) == intSet({1, 2}));
    CHECK(f.call("andOp", {intSet({1, 2}), intSet({2, 3})}) == intSet({2}));
    CHECK(f.call("subOp", {intSet({1, 2}), intSet({2})}) == intSet({1}));
    CHECK(f.call("addOp", {AspectValue::str("ab"), AspectValue::str("c")}) ==
          AspectValue::str("abc"));
    CHECK(f.call("addOp", {ints({1}), ints({2})}) == ints({1, 2}));

    AspectValue::MapRep l, r;
    l[AspectValue::str("a")] = AspectValue::integer(1);
    r[AspectValue::str("b")] = AspectValue::integer(2);
    AspectValue merged = f.call(
        "orOp", {AspectValue::map(std::move(l)), AspectValue::map(std::move(r))});
    CHECK(merged.repr() == "{'a': 1, 'b': 2}");

    CHECK(f.call("augUnion", {intSet({1}), intSet({2})}) == intSet({1, 2}));

    CHECK_THROWS_WITH_AS(
        f.call("andOp", {AspectValue::map(), AspectValue::map()}),
        doctest::Contains("unsupported operand types for '&': dict and dict"),
        EvalError);
    CHECK_THROWS_WITH_AS(
        f.call("orOp", {AspectValue::none(), AspectValue::boolean(true)}),
        doctest::Contains("None is not allowed as an operand of '|'"),
        EvalError);
}

TEST_CASE("ordering works for ints, strings and set inclusion") {
    Fixture f;
    CHECK(f.call("less", {AspectValue::integer(1), AspectValue::integer(2)}) ==
          AspectValue::boolean(true));
    CHECK(f.call("less", {AspectValue::str("a"), AspectValue::str("b")}) ==
          AspectValue::boolean(true));
    CHECK(f.call("lessEq", {intSet({1}), intSet({1, 2})}) ==
          AspectValue::boolean(true));
    CHECK(f.call("less", {intSet({1}), intSet({1})}) ==
          AspectValue::boolean(false));
    CHECK_THROWS_WITH_AS(
        f.call("less", {intSet({1}), ints({1})}),
        doctest::Contains("cannot order set and list with '<'"), EvalError);
}

TEST_CASE("membership covers sets, lists, maps and strings") {
    Fixture f;
    CHECK(f.call("has", {AspectValue::integer(1), intSet({1, 2})}) ==
          AspectValue::boolean(true));
    CHECK(f.call("lacks", {AspectValue::integer(3), intSet({1, 2})}) ==
          AspectValue::boolean(true));
    CHECK(f.call("has", {AspectValue::integer(2), ints({1, 2})}) ==
          AspectValue::boolean(true));
    AspectValue::MapRep mr;
    mr[AspectValue::str("k")] = AspectValue::integer(1);
    CHECK(f.call("has", {AspectValue::str("k"), AspectValue::map(std::move(mr))}) ==
          AspectValue::boolean(true));
    CHECK(f.call("has", {AspectValue::str("ell"), AspectValue::str("hello")}) ==
          AspectValue::boolean(true));
    CHECK_THROWS_WITH_AS(
        f.call("has", {AspectValue::integer(1), AspectValue::str("x")}),
        doctest::Contains("'in <str>' needs a str operand, got int"),
        EvalError);
    CHECK_THROWS_WITH_AS(
        f.call("has", {AspectValue::integer(1), AspectValue::integer(2)}),
        doctest::Contains("'int' is not a container"), EvalError);
}

TEST_CASE("conditions and boolean operators insist on bools") {
    Fixture f;
    CHECK(f.call("truthy", {AspectValue::boolean(true)}) ==
          AspectValue::boolean(true));
    CHECK_THROWS_WITH_AS(f.call("truthy", {AspectValue::integer(1)}),
                         doctest::Contains("must be a bool, got int"),
                         EvalError);
    CHECK(f.call("notOp", {AspectValue::boolean(false)}) ==
          AspectValue::boolean(true));
    CHECK_THROWS_WITH_AS(f.call("notOp", {intSet({})}),
                         doctest::Contains("must be a bool, got set"),
                         EvalError);
    CHECK(f.call("negOp", {AspectValue::integer(5)}) ==
          AspectValue::integer(-5));
    CHECK_THROWS_WITH_AS(f.call("negOp", {AspectValue::str("s")}),
                         doctest::Contains("unary '-' needs an int, got str"),
                         EvalError);
}

TEST_CASE("subscripts read and write lists and maps") {
    Fixture f;
    CHECK(f.call("getItem", {ints({10, 20}), AspectValue::integer(1)}) ==
          AspectValue::integer(20));
    CHECK(f.call("getItem", {ints({10, 20}), AspectValue::integer(-1)}) ==
          AspectValue::integer(20));
    CHECK_THROWS_WITH_AS(
        f.call("getItem", {ints({10}), AspectValue::integer(4)}),
        doctest::Contains("list index out of range"), EvalError);

    AspectValue::MapRep mr;
    mr[AspectValue::str("k")] = AspectValue::integer(1);
    AspectValue m = AspectValue::map(std::move(mr));
    CHECK(f.call("getItem", {m, AspectValue::str("k")}) ==
          AspectValue::integer(1));
    CHECK_THROWS_WITH_AS(f.call("getItem", {m, AspectValue::str("z")}),
                         doctest::Contains("map key 'z' not found"), EvalError);

    AspectValue l = ints({1, 2});
    f.call("setItem", {l, AspectValue::integer(0), AspectValue::integer(9)});
    CHECK(l == ints({9, 2}));
    f.call("setItem", {m, AspectValue::str("z"), AspectValue::integer(3)});
    CHECK(m.asMap().size() == 2);
    CHECK_THROWS_WITH_AS(
        f.call("setItem", {AspectValue::str("s"), AspectValue::integer(0),
                           AspectValue::integer(1)}),
        doctest::Contains("'str' does not support item assignment"), EvalError);
}

TEST_CASE("methods mutate the shared receiver") {
    Fixture f;
    AspectValue l = ints({10, 20, 30});
    CHECK(f.call("popAt", {l, AspectValue::integer(1)}) ==
          AspectValue::integer(20));
    CHECK(l == ints({10, 30}));
    CHECK(f.call("popAt", {l, AspectValue::integer(-1)}) ==
          AspectValue::integer(30));
    CHECK(l == ints({10}));
    CHECK(f.call("popLast", {l}) == AspectValue::integer(10));
    CHECK(l == ints({}));
    CHECK_THROWS_WITH_AS(f.call("popLast", {l}),
                         doctest::Contains("pop from empty list"), EvalError);
    CHECK_THROWS_WITH_AS(
        f.call("popAt", {ints({1}), AspectValue::integer(5)}),
        doctest::Contains("pop index out of range"), EvalError);

    AspectValue grown = ints({1});
    CHECK(f.call("pushed", {grown, AspectValue::integer(2)}) == ints({1, 2}));
    CHECK(grown == ints({1, 2}));

    AspectValue::MapRep mr;
    mr[AspectValue::str("b")] = AspectValue::integer(2);
    mr[AspectValue::str("a")] = AspectValue::integer(1);
    AspectValue m = AspectValue::map(std::move(mr));
    AspectValue keys = f.call("keysOf", {m});
    CHECK(keys.repr() == "{'a', 'b'}");
    CHECK(f.call("keysOf", {m}).asSet().size() == 2);
    AspectValue popped = m;
    f.call("popAt", {popped, AspectValue::str("a")});
    CHECK(m.asMap().size() == 1);
}

TEST_CASE("for loops iterate lists, sets and map keys") {
    Fixture f;
    CHECK(f.call("iterSum", {ints({1, 2, 3})}) == AspectValue::integer(6));
    CHECK(f.call("iterSum", {intSet({4, 5})}) == AspectValue::integer(9));
    AspectValue::MapRep mr;
    mr[AspectValue::integer(7)] = AspectValue::str("x");
    CHECK(f.call("iterSum", {AspectValue::map(std::move(mr))}) ==
          AspectValue::integer(7));
    CHECK_THROWS_WITH_AS(f.call("iterSum", {AspectValue::integer(1)}),
                         doctest::Contains("cannot iterate over int"),
                         EvalError);
}

TEST_CASE("builtins mirror their python namesakes") {
    Fixture f;
    CHECK(f.call("len", {AspectValue::str("abc")}) == AspectValue::integer(3));
    CHECK(f.call("len", {intSet({1, 2})}) == AspectValue::integer(2));
    CHECK(f.call("len", {ints({1})}) == AspectValue::integer(1));
    CHECK(f.call("len", {AspectValue::map()}) == AspectValue::integer(0));
    CHECK_THROWS_WITH_AS(f.call("len", {AspectValue::integer(1)}),
                         doctest::Contains("len() of int"), EvalError);

    CHECK(f.call("set", {}) == AspectValue::set());
    CHECK(f.call("set", {ints({1, 2, 2})}) == intSet({1, 2}));
    AspectValue::MapRep mr;
    mr[AspectValue::str("k")] = AspectValue::integer(1);
    CHECK(f.call("set", {AspectValue::map(std::move(mr))}).repr() == "{'k'}");
    CHECK_THROWS_WITH_AS(f.call("set", {AspectValue::integer(5)}),
                         doctest::Contains("set() of int"), EvalError);

    AspectValue shared = ints({1});
    AspectValue copied = f.call("deepcopy", {shared});
    copied.asList().push_back(AspectValue::integer(2));
    CHECK(shared == ints({1}));

    CHECK(f.call("type", {intSet({})}) == AspectValue::str("set"));
    CHECK(f.call("type", {AspectValue::none()}) == AspectValue::str("NoneType"));

    CHECK_THROWS_WITH_AS(f.call("nosuch", {}),
                         doctest::Contains("unknown function 'nosuch'"),
                         EvalError);
    CHECK_THROWS_WITH_AS(f.call("len", {}),
                         doctest::Contains("len() takes 1 argument(s), got 0"),
                         EvalError);
}

TEST_CASE("pointcut advice binds statement expressions positionally") {
    Fixture f;
    const PointcutDef* pc =
        f.prog.traversals[0].pointcutFor(StatementLabel::Assign);
    REQUIRE(pc != nullptr);

    SymbolicState st;
    st.label = StatementLabel::Assign;
    st.loc = 7;
    st.exprs = {ExprUsage{{"x"}, {}, {}}, ExprUsage{{}, {"a", "b"}, {}}};

    TravMap tm;
    f.rt.runPointcut(*pc, st, tm);
    CHECK(tm.at("Flag") == AspectValue::boolean(true));
    CHECK(tm.at("Bag") == symbolSet({"a", "b"}));

    SymbolicState narrow;
    narrow.label = StatementLabel::Assign;
    narrow.loc = 7;
    narrow.exprs = {ExprUsage{}};
    CHECK_THROWS_WITH_AS(f.rt.runPointcut(*pc, narrow, tm),
                         "pointcut Assign of traversal travT takes 2 "
                         "expression(s), statement at line 7 carries 1",
                         EvalError);
}

TEST_CASE("locals vanish between weave invocations") {
    Fixture f;
    const PointcutDef* pc =
        f.prog.traversals[0].pointcutFor(StatementLabel::Exp);
    REQUIRE(pc != nullptr);

    SymbolicState first;
    first.label = StatementLabel::Exp;
    first.exprs = {ExprUsage{}};
    first.enterLoop = true;
    TravMap tm;
    f.rt.runPointcut(*pc, first, tm);
    CHECK(tm.at("Bag") == intSet({1}));

    SymbolicState second;
    second.label = StatementLabel::Exp;
    second.exprs = {ExprUsage{}};
    second.enterLoop = false;
    CHECK_THROWS_WITH_AS(f.rt.runPointcut(*pc, second, tm),
                         doctest::Contains("name 'stash' is not defined"),
                         EvalError);
}

TEST_CASE("aspect writes are type-checked after each weave") {
    Fixture f;
    TravMap tm;
    tm["Flag"] = AspectValue::integer(3);
    CHECK_THROWS_WITH_AS(f.rt.typeCheck(tm),
                         "aspect 'Flag' of traversal travT holds int, "
                         "declared aspectType bool",
                         EvalError);
    tm["Flag"] = AspectValue::none();  // uninitialized passes
    f.rt.typeCheck(tm);
    tm["Flag"] = AspectValue::boolean(true);
    f.rt.typeCheck(tm);
}

TEST_CASE("the custom merge function runs over both traversal maps") {
    Fixture f;
    TravMap left{{"Flag", AspectValue::boolean(true)},
                 {"Bag", intSet({1})}};
    TravMap right{{"Flag", AspectValue::boolean(false)},
                  {"Bag", intSet({2})}};
    TravMap out = f.rt.runMerge(left, right);
    // m1 | m2 lets the right map win on shared keys.
    CHECK(out.at("Flag") == AspectValue::boolean(false));
    CHECK(out.at("Bag") == intSet({2}));
    out.at("Bag").asSet().insert(AspectValue::integer(9));
    CHECK(right.at("Bag") == intSet({2}));
}
