#include <doctest.h>

#include <map>
#include <memory>

#include "recur/runtime.hpp"

using namespace recur;

namespace {

// A generator scripted by invocation index.
Generator scripted(std::vector<TokenSeq> steps) {
    auto state = std::make_shared<std::size_t>(0);
    auto list = std::make_shared<std::vector<TokenSeq>>(std::move(steps));
    return [state, list](const TokenSeq&) -> TokenSeq {
        if (*state >= list->size())
            throw GeneratorError("script exhausted");
        return (*list)[(*state)++];
    };
}

TokenSeq call_of(std::initializer_list<Token> payload) {
    TokenSeq out{tok::CallOpen};
    out.insert(out.end(), payload.begin(), payload.end());
    out.push_back(tok::CallClose);
    return out;
}

TokenSeq ret_of(std::initializer_list<Token> payload) {
    TokenSeq out{tok::RetOpen};
    out.insert(out.end(), payload.begin(), payload.end());
    out.push_back(tok::RetClose);
    return out;
}

}  // namespace

TEST_CASE("classify: terminal call block") {
    GeneratorOutput out = classify_output(
        {"abc", tok::CallOpen, "q1", tok::CallClose});
    CHECK(out.kind == OutputKind::Call);
    CHECK(out.prefix == TokenSeq{"abc"});
    CHECK(out.payload == TokenSeq{"q1"});
}

TEST_CASE("classify: plain when no terminal pattern") {
    GeneratorOutput out = classify_output({"abc"});
    CHECK(out.kind == OutputKind::Plain);
    CHECK(out.prefix == TokenSeq{"abc"});
    CHECK(out.payload.empty());
}

TEST_CASE("classify: empty return payload") {
    GeneratorOutput out = classify_output({tok::RetOpen, tok::RetClose});
    CHECK(out.kind == OutputKind::Return);
    CHECK(out.prefix.empty());
    CHECK(out.payload.empty());
}

TEST_CASE("classify: mismatched nesting is plain") {
    // <call> a <return> b </call>
    GeneratorOutput out = classify_output(
        {tok::CallOpen, "a", tok::RetOpen, "b", tok::CallClose});
    CHECK(out.kind == OutputKind::Plain);
    // </return> with a <call> prefix inside the payload is the tail-call
    // handoff and classifies as a return.
    out = classify_output(
        {"x", tok::RetOpen, tok::CallOpen, "z", tok::RetClose});
    CHECK(out.kind == OutputKind::Return);
    CHECK(out.payload == TokenSeq{tok::CallOpen, "z"});
}

TEST_CASE("classify: non-terminal block is plain") {
    GeneratorOutput out = classify_output(
        {tok::CallOpen, "q", tok::CallClose, "trailing"});
    CHECK(out.kind == OutputKind::Plain);
}

TEST_CASE("classify: SEP allowed inside payloads") {
    GeneratorOutput out = classify_output(
        {tok::RetOpen, tok::Sep, "v", tok::RetClose});
    CHECK(out.kind == OutputKind::Return);
    CHECK(out.payload == TokenSeq{tok::Sep, "v"});
}

TEST_CASE("measure") {
    ContextStack s{TokenSeq{"a", "b"}};
    s.push(TokenSeq{"c"}, TokenSeq{"c"});
    auto [gs, ls] = measure(s);
    CHECK(gs == 3);
    CHECK(ls == 2);

    ContextStack empty{TokenSeq{}};
    auto [gs2, ls2] = measure(empty);
    CHECK(gs2 == 0);
    CHECK(ls2 == 0);

    ContextStack one{TokenSeq{"a", "b", "c"}};
    auto [gs3, ls3] = measure(one);
    CHECK(gs3 == 3);
    CHECK(ls3 == 3);
}

TEST_CASE("apply_transition: call pushes, basic parent keeps prefix") {
    RunConfig cfg;
    ContextStack s{TokenSeq{"s0"}};
    apply_transition(s, {OutputKind::Call, {"y'"}, {"q"}}, cfg);
    CHECK(s.depth() == 2);
    CHECK(s.frame(0) == TokenSeq{"y'"});
    CHECK(s.active() == TokenSeq{"q"});
}

TEST_CASE("apply_transition: return pops and appends payload") {
    RunConfig cfg;
    ContextStack s{TokenSeq{"s0"}};
    s.push(TokenSeq{"s1"}, TokenSeq{"s1"});
    apply_transition(s, {OutputKind::Return, {"junk"}, {"a"}}, cfg);
    CHECK(s.depth() == 1);
    CHECK(s.active() == TokenSeq{"s0", "a"});
}

TEST_CASE("apply_transition: question preservation keeps q, renders pair") {
    RunConfig cfg;
    cfg.question_preservation = true;
    ContextStack s{TokenSeq{"s'"}};
    apply_transition(s, {OutputKind::Call, {"s'"}, {"q"}}, cfg);
    CHECK(s.depth() == 2);
    CHECK(s.frame(0) == TokenSeq{"s'", "q"});  // Eq. 5 keeps q in the parent

    apply_transition(s, {OutputKind::Return, {}, {"No"}}, cfg);
    CHECK(s.depth() == 1);
    CHECK(render(s.active()) == "s' q. The answer is: No.\n");
}

TEST_CASE("run: echo generator answers at depth 1") {
    Generator echo = [](const TokenSeq& view) {
        TokenSeq out{tok::RetOpen};
        append(out, view);
        out.push_back(tok::RetClose);
        return out;
    };
    RunResult r = run({"p"}, echo, {});
    REQUIRE(r.is_answer());
    CHECK(r.answer == TokenSeq{"p"});
    CHECK(r.trace.max_depth == 1);
    CHECK(r.trace.total_steps == 1);
}

TEST_CASE("run: generator that always emits plain hits a bottom") {
    RunConfig cfg;
    cfg.max_local_space = 32;
    cfg.max_steps = 100;
    Generator grow = [](const TokenSeq&) { return TokenSeq{"x"}; };
    RunResult r = run({"p"}, grow, cfg);
    REQUIRE(!r.is_answer());
    CHECK(r.reason == BottomReason::MalformedOutput);
}

TEST_CASE("run: empty plain continuation repeats the stack state") {
    Generator stall = [](const TokenSeq&) { return TokenSeq{}; };
    RunResult r = run({"p"}, stall, {});
    REQUIRE(!r.is_answer());
    CHECK(r.reason == BottomReason::LoopDetected);
}

TEST_CASE("run: call/return ping-pong is a loop") {
    // On [p]: call q. On [q]: return empty payload -> parent back to [p].
    Generator gen = [](const TokenSeq& view) -> TokenSeq {
        if (view == TokenSeq{"p"})
            return call_of({"q"});
        return ret_of({});
    };
    RunResult r = run({"p"}, gen, {});
    REQUIRE(!r.is_answer());
    CHECK(r.reason == BottomReason::LoopDetected);
}

TEST_CASE("run: unbounded call chain exceeds the depth limit") {
    RunConfig cfg;
    cfg.max_depth = 16;
    Generator gen = [](const TokenSeq&) { return call_of({"p"}); };
    RunResult r = run({"p"}, gen, cfg);
    REQUIRE(!r.is_answer());
    CHECK(r.reason == BottomReason::LimitExceeded);
    CHECK(r.limit == LimitKind::Depth);
}

TEST_CASE("run: step limit") {
    RunConfig cfg;
    cfg.max_steps = 5;
    cfg.loop_detection = false;
    std::size_t n = 0;
    Generator gen = [&n](const TokenSeq&) {
        return TokenSeq{"t" + std::to_string(n++)};
    };
    RunResult r = run({"p"}, gen, cfg);
    REQUIRE(!r.is_answer());
    CHECK(r.reason == BottomReason::LimitExceeded);
    CHECK(r.limit == LimitKind::Steps);
    CHECK(r.trace.total_steps == 5);
}

TEST_CASE("run: generator errors surface as malformed output") {
    Generator bad = [](const TokenSeq&) -> TokenSeq {
        throw GeneratorError("unparseable frame");
    };
    RunResult r = run({"p"}, bad, {});
    REQUIRE(!r.is_answer());
    CHECK(r.reason == BottomReason::MalformedOutput);
}

TEST_CASE("run: prompt prefixing transforms the generator view only") {
    std::vector<TokenSeq> views;
    Generator gen = [&views](const TokenSeq& view) -> TokenSeq {
        views.push_back(view);
        if (views.size() == 1)
            return call_of({"sub"});
        return ret_of({"a"});
    };
    RunConfig cfg;
    cfg.prompt_prefixing = true;
    RunResult r = run({"root"}, gen, cfg);
    REQUIRE(r.is_answer());
    // Step 1 sees the bare prompt (t = 0), step 2 the prefixed child frame.
    REQUIRE(views.size() >= 2);
    CHECK(views[0] == TokenSeq{"root"});
    CHECK(views[1] == TokenSeq{"root", "sub"});
}

TEST_CASE("run: conservation of global space on return") {
    // Stack [s0, s1]; return payload "a" discards the popped frame.
    Generator gen = [](const TokenSeq& view) -> TokenSeq {
        if (view == TokenSeq{"p"})
            return call_of({"q", "q2"});
        return TokenSeq{"think", tok::RetOpen, "a", tok::RetClose};
    };
    RunConfig cfg;
    cfg.keep_step_log = true;
    RunResult r = run({"p"}, gen, cfg);
    // After the call: frames [p],[q,q2]: gs=3. After return: [p,a]: gs=2 =
    // 3 - |popped frame| (2) + |payload| (1).
    REQUIRE(r.trace.per_step.size() == 3);
    CHECK(r.trace.per_step[1].global_space == 3);
    CHECK(r.trace.per_step[2].global_space == 2);
}

TEST_CASE("run: determinism") {
    auto make = [] {
        return scripted({call_of({"q"}), ret_of({"a"}),
                         TokenSeq{"x", tok::RetOpen, "done", tok::RetClose}});
    };
    RunConfig cfg;
    cfg.keep_step_log = true;
    RunResult a = run({"p"}, make(), cfg);
    RunResult b = run({"p"}, make(), cfg);
    CHECK(a == b);
    REQUIRE(a.is_answer());
    CHECK(a.answer == TokenSeq{"done"});
}

TEST_CASE("trace record round-trips") {
    ResourceTrace t;
    t.max_local_space = 5;
    t.max_global_space = 9;
    t.max_depth = 2;
    t.total_steps = 7;
    t.total_tokens_emitted = 21;
    ResourceTrace back = parse_trace_record(render_trace_record(t));
    CHECK(back == t);
}

TEST_CASE("detect_loop: whole-stack fingerprints") {
    ContextStack a{TokenSeq{"p"}};
    LoopHistory hist;
    CHECK(!detect_loop(hist, a));  // first visit
    CHECK(detect_loop(hist, a));   // repeat

    // Two stacks differing only in a suspended frame are distinct.
    ContextStack b{TokenSeq{"p"}};
    b.push(TokenSeq{"x"}, {});
    ContextStack c{TokenSeq{"q"}};
    c.push(TokenSeq{"x"}, {});
    LoopHistory hist2;
    CHECK(!detect_loop(hist2, b));
    CHECK(!detect_loop(hist2, c));
}

TEST_CASE("run config validation") {
    RunConfig cfg;
    cfg.max_steps = 0;
    CHECK_THROWS_AS(run({"p"}, [](const TokenSeq&) { return TokenSeq{}; },
                        cfg),
                    std::invalid_argument);
}
