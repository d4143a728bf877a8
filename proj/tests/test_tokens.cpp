#include <doctest.h>

#include "recur/tokens.hpp"

using namespace recur;

TEST_CASE("render joins words and keeps blocks tight") {
    TokenSeq seq{"Try", "Alice", "=", "True", tok::Newline, tok::CallOpen,
                 "Alice=True", tok::CallClose};
    CHECK(render(seq) == "Try Alice = True\n<call>Alice=True</call>");
}

TEST_CASE("render handles return blocks and SEP") {
    CHECK(render({tok::RetOpen, tok::Sep, "q1", tok::RetClose}) ==
          "<return>[SEP] q1</return>");
    CHECK(render({"a", tok::Sep, "b"}) == "a [SEP] b");
    CHECK(render({}) == "");
}

TEST_CASE("tokenize recognizes markers glued to text") {
    TokenSeq got = tokenize("abc<call>q1</call>");
    TokenSeq want{"abc", tok::CallOpen, "q1", tok::CallClose};
    CHECK(got == want);
}

TEST_CASE("tokenize splits words and newlines") {
    TokenSeq got = tokenize("Try Alice = True\n<return>No</return>");
    TokenSeq want{"Try", "Alice", "=", "True", tok::Newline,
                  tok::RetOpen, "No", tok::RetClose};
    CHECK(got == want);
}

TEST_CASE("line-leading indentation stays with the first word") {
    std::string text = "Condition 1:\n  Clause: (Alice v ~Carol)\n";
    TokenSeq toks = tokenize(text);
    CHECK(toks[3] == "  Clause:");
    CHECK(render(toks) == text);
}

TEST_CASE("render/tokenize round-trips generated trace text") {
    std::string text =
        "Given: Alice=True, Carol=True\n"
        "Condition 4:\n"
        "  Clause: (~Alice v ~Carol)\n"
        "  Simplify as: () -> CONFLICT\n"
        "Contradiction!\n<return>No</return>";
    CHECK(render(tokenize(text)) == text);
}

TEST_CASE("marker classification") {
    CHECK(is_structural_marker(tok::CallOpen));
    CHECK(is_structural_marker(tok::RetClose));
    CHECK(!is_structural_marker(tok::Sep));
    CHECK(is_reserved_marker(tok::Sep));
    CHECK(!is_reserved_marker("word"));
}
