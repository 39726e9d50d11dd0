#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "saga/errors.hpp"
#include "saga/tokenizer.hpp"

using namespace saga;

namespace {

std::vector<std::string> kinds(const std::vector<Token>& toks) {
    std::vector<std::string> out;
    for (const Token& t : toks) {
        switch (t.kind) {
            case TokenKind::Name: out.push_back("name:" + t.text); break;
            case TokenKind::Number: out.push_back("num:" + t.text); break;
            case TokenKind::String: out.push_back("str:" + t.text); break;
            case TokenKind::FString: out.push_back("fstr:" + t.text); break;
            case TokenKind::Op: out.push_back("op:" + t.text); break;
            case TokenKind::Newline: out.push_back("nl"); break;
            case TokenKind::Indent: out.push_back("indent"); break;
            case TokenKind::Dedent: out.push_back("dedent"); break;
            case TokenKind::EndOfFile: out.push_back("eof"); break;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("flat statement produces name/op/number stream") {
    auto toks = tokenize("x = 42\n");
    std::vector<std::string> expect = {"name:x", "op:=", "num:42", "nl", "eof"};
    CHECK(kinds(toks) == expect);
    CHECK(toks[0].line == 1);
    CHECK(toks[0].col == 1);
    CHECK(toks[2].col == 5);
}

TEST_CASE("suite indentation emits indent and dedent tokens") {
    auto toks = tokenize("if a:\n    b = 1\nc = 2\n");
    std::vector<std::string> expect = {
        "name:if", "name:a", "op::", "nl",
        "indent", "name:b", "op:=", "num:1", "nl", "dedent",
        "name:c", "op:=", "num:2", "nl", "eof"};
    CHECK(kinds(toks) == expect);
}

TEST_CASE("nested suites close with stacked dedents at end of input") {
    auto toks = tokenize("if a:\n  if b:\n    c\n");
    auto k = kinds(toks);
    REQUIRE(k.size() >= 3);
    CHECK(k[k.size() - 1] == "eof");
    CHECK(k[k.size() - 2] == "dedent");
    CHECK(k[k.size() - 3] == "dedent");
}

TEST_CASE("comments and blank lines contribute no tokens") {
    auto toks = tokenize("# leading\nx = 1  # trailing\n\n   \ny = 2\n");
    std::vector<std::string> expect = {"name:x", "op:=", "num:1", "nl",
                                       "name:y", "op:=", "num:2", "nl", "eof"};
    CHECK(kinds(toks) == expect);
}

TEST_CASE("brackets join physical lines into one logical line") {
    auto toks = tokenize("f(a,\n  b)\n");
    std::vector<std::string> expect = {"name:f", "op:(", "name:a", "op:,",
                                       "name:b", "op:)", "nl", "eof"};
    CHECK(kinds(toks) == expect);
}

TEST_CASE("backslash continuation joins lines without a newline token") {
    auto toks = tokenize("a = 1 + \\\n    2\n");
    std::vector<std::string> expect = {"name:a", "op:=", "num:1", "op:+",
                                       "num:2", "nl", "eof"};
    CHECK(kinds(toks) == expect);
}

TEST_CASE("number text is the source slice") {
    auto toks = tokenize("a = 0o77\nb = 0x1F\nc = 1.5e3\nd = 10_000\ne = 3j\n");
    auto k = kinds(toks);
    CHECK(k[2] == "num:0o77");
    CHECK(k[6] == "num:0x1F");
    CHECK(k[10] == "num:1.5e3");
    CHECK(k[14] == "num:10_000");
    CHECK(k[18] == "num:3j");
}

TEST_CASE("string text is the decoded content") {
    auto toks = tokenize("s = 'a\\tb'\n");
    CHECK(toks[2].kind == TokenKind::String);
    CHECK(toks[2].text == "a\tb");
}

TEST_CASE("unknown escapes stay verbatim") {
    auto toks = tokenize("s = '\\x00\\x1a \\n\\r\\t'\n");
    CHECK(toks[2].text == "\\x00\\x1a \n\r\t");
}

TEST_CASE("raw strings keep backslashes") {
    auto toks = tokenize("s = r'[^a-z]\\d+'\n");
    CHECK(toks[2].kind == TokenKind::String);
    CHECK(toks[2].text == "[^a-z]\\d+");
}

TEST_CASE("format strings keep their body and are tagged") {
    auto toks = tokenize("s = f'{x}.txt'\n");
    CHECK(toks[2].kind == TokenKind::FString);
    CHECK(toks[2].text == "{x}.txt");
}

TEST_CASE("triple-quoted strings span lines") {
    auto toks = tokenize("s = '''one\ntwo'''\n");
    CHECK(toks[2].kind == TokenKind::String);
    CHECK(toks[2].text == "one\ntwo");
}

TEST_CASE("adjacent quotes inside triple strings are kept") {
    auto toks = tokenize("s = \"\"\"a\"b\"\"\"\n");
    CHECK(toks[2].text == "a\"b");
}

TEST_CASE("multi-character operators lex greedily") {
    auto toks = tokenize("a **= b ** c // d != e := f\n");
    auto k = kinds(toks);
    std::vector<std::string> expect = {"name:a", "op:**=", "name:b", "op:**",
                                       "name:c", "op://",  "name:d", "op:!=",
                                       "name:e", "op::=",  "name:f", "nl",
                                       "eof"};
    CHECK(k == expect);
}

TEST_CASE("logical line without trailing newline still ends the line") {
    auto toks = tokenize("x = 1");
    std::vector<std::string> expect = {"name:x", "op:=", "num:1", "nl", "eof"};
    CHECK(kinds(toks) == expect);
}

TEST_CASE("unterminated string raises a syntax error with position") {
    CHECK_THROWS_AS(tokenize("s = 'abc\n"), SyntaxError);
    try {
        tokenize("x = 2\ns = 'abc\n");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 2);
        CHECK(e.col == 5);
    }
}

TEST_CASE("stray characters raise a syntax error") {
    CHECK_THROWS_AS(tokenize("a = 1 ? 2\n"), SyntaxError);
}

TEST_CASE("inconsistent indentation is rejected") {
    CHECK_THROWS_AS(tokenize("if a:\n    b\n  c\n"), SyntaxError);
}
