#include <doctest.h>

#include <cmath>

#include "recur/builtin_machines.hpp"
#include "recur/rec_tm.hpp"

using namespace recur;

namespace {

std::vector<Symbol> sym(const std::string& s) {
    std::vector<Symbol> out;
    for (char c : s)
        out.push_back(std::string(1, c));
    return out;
}

std::vector<std::string> binary_strings(std::size_t max_len) {
    std::vector<std::string> out{""};
    for (std::size_t len = 1; len <= max_len; ++len)
        for (std::size_t v = 0; v < (1u << len); ++v) {
            std::string s;
            for (std::size_t i = 0; i < len; ++i)
                s += ((v >> i) & 1) ? '1' : '0';
            out.push_back(s);
        }
    return out;
}

}  // namespace

TEST_CASE("binary and signed literals round-trip") {
    CHECK(encode_binary(0) == TokenSeq{"0"});
    CHECK(encode_binary(6) == TokenSeq{"1", "1", "0"});
    for (std::uint64_t v : {0ull, 1ull, 5ull, 127ull, 4096ull})
        CHECK(parse_binary(encode_binary(v)) == v);
    for (std::int64_t v : {0ll, 3ll, -3ll, -17ll, 1024ll})
        CHECK(parse_signed(encode_signed(v)) == v);
    CHECK_THROWS_AS(parse_binary({"2"}), GeneratorError);
}

TEST_CASE("frame codec") {
    RecFrame f;
    f.fn = RecFn::Cell;
    f.input = sym("10");
    f.t = 5;
    f.p = -2;
    TokenSeq enc = encode_rec_frame(f);
    RecFrame back = parse_rec_frame(enc);
    CHECK(back.fn == RecFn::Cell);
    CHECK(back.input == f.input);
    CHECK(back.t == 5);
    CHECK(back.p == -2);
    CHECK(back.phase() == 0);

    // cached values arrive as [SEP]-prefixed return payloads
    enc.push_back(tok::Sep);
    enc.push_back("+");
    enc.push_back("1");
    RecFrame withcache = parse_rec_frame(enc);
    CHECK(withcache.phase() == 1);
    CHECK(withcache.cached[0] == TokenSeq{"+", "1"});
}

TEST_CASE("base cases return immediately") {
    RecTmGenerator gen(builtin_tm("parity"), false);

    RecFrame state0;
    state0.fn = RecFn::State;
    state0.input = sym("1");
    state0.t = 0;
    TokenSeq out = gen(encode_rec_frame(state0));
    CHECK(out == TokenSeq{tok::RetOpen, tok::Sep, "even", tok::RetClose});

    RecFrame cell0;
    cell0.fn = RecFn::Cell;
    cell0.input = sym("10");
    cell0.t = 0;
    cell0.p = 0;
    out = gen(encode_rec_frame(cell0));
    CHECK(out == TokenSeq{tok::RetOpen, tok::Sep, "1", tok::RetClose});

    cell0.p = 7;  // outside the input: blank
    out = gen(encode_rec_frame(cell0));
    CHECK(out == TokenSeq{tok::RetOpen, tok::Sep, "_", tok::RetClose});
}

TEST_CASE("STATE(x,1) resolves to the directly simulated state") {
    TuringMachine tm = builtin_tm("parity");
    RecTmGenerator gen(tm, false);
    RecFrame root;
    root.fn = RecFn::State;
    root.input = sym("1");
    root.t = 1;
    RunResult r = run(encode_rec_frame(root), std::ref(gen), RunConfig{});
    REQUIRE(r.is_answer());
    Configuration direct = step_tm(
        tm, initial_configuration(tm.initial, sym("1")));
    CHECK(r.answer == TokenSeq{tok::Sep, direct.state});
}

TEST_CASE("decide matches direct simulation on every fixture input") {
    for (const char* name : {"parity", "increment", "palindrome"}) {
        TuringMachine tm = builtin_tm(name);
        for (const std::string& s : binary_strings(4)) {
            auto x = sym(s);
            Verdict direct = run_tm(tm, x, 1u << 20).verdict;
            DecideResult d = decide(tm, x, /*memoize=*/true);
            CAPTURE(name);
            CAPTURE(s);
            CHECK(d.verdict == direct);
        }
    }
}

TEST_CASE("memoized and unmemoized runs agree, memo is never slower") {
    TuringMachine tm = builtin_tm("parity");
    for (const std::string& s : {"", "1", "10", "110"}) {
        auto x = sym(s);
        DecideResult plain = decide(tm, x, false);
        DecideResult memo = decide(tm, x, true);
        CHECK(plain.verdict == memo.verdict);
        CHECK(memo.run.trace.total_steps <= plain.run.trace.total_steps);
    }
}

TEST_CASE("frame lengths stay within the grammar bound") {
    TuringMachine tm = builtin_tm("countdown");
    auto x = sym("101");
    TmRunResult direct = run_tm(tm, x, 1u << 20);
    double log_term = std::ceil(std::log2(double(direct.time + 2)));
    std::size_t bound = kRecFrameLenA *
                            (x.size() + static_cast<std::size_t>(log_term)) +
                        kRecFrameLenB;
    std::size_t max_frame = 0;
    RecRunLimits limits;
    limits.observer = [&](const StepEvent& e) {
        for (const TokenSeq& frame : e.stack.frames())
            max_frame = std::max(max_frame, frame.size());
    };
    DecideResult d = decide(tm, x, true, limits);
    REQUIRE(d.run.is_answer());
    CHECK(max_frame <= bound);
    CHECK(max_frame > 0);
}

TEST_CASE("ledger counts frames by tag") {
    TuringMachine tm = builtin_tm("parity");
    std::uint64_t total = measure_cost(tm, sym("1"), RecFn::Symbol, 0);
    // SYMBOL(x,0) spawns POS(x,0) and CELL(x,0,p): three frames.
    CHECK(total == 3);
    CHECK(measure_cost(tm, sym("1"), RecFn::State, 0) == 1);
}

TEST_CASE("unmemoized counts satisfy the invocation recurrences") {
    TuringMachine tm = builtin_tm("toggler");
    auto x = sym("1");
    const std::uint64_t t_max = 5;
    std::vector<std::uint64_t> S(t_max + 1), P(t_max + 1), Y(t_max + 1),
        C(t_max + 1);
    for (std::uint64_t t = 0; t <= t_max; ++t) {
        S[t] = measure_cost(tm, x, RecFn::State, t);
        P[t] = measure_cost(tm, x, RecFn::Pos, t);
        Y[t] = measure_cost(tm, x, RecFn::Symbol, t);
        std::uint64_t c = 0;
        for (std::int64_t p = -std::int64_t(t); p <= std::int64_t(t); ++p)
            c = std::max(c, measure_cost(tm, x, RecFn::Cell, t, p));
        C[t] = c;
    }
    for (std::uint64_t t = 1; t <= t_max; ++t) {
        CHECK(S[t] <= S[t - 1] + Y[t - 1] + 1);
        CHECK(P[t] <= P[t - 1] + S[t - 1] + Y[t - 1] + 1);
        CHECK(C[t] <= P[t - 1] + std::max(C[t - 1], S[t - 1] + Y[t - 1]) + 1);
        CHECK(Y[t] <= P[t] + C[t] + 1);
    }
    // RUN(t) <= STATE(t) + RUN(t+1) + 1 on a halting machine.
    TuringMachine parity = builtin_tm("parity");
    auto px = sym("11");
    for (std::uint64_t t = 0; t + 1 <= 3; ++t) {
        std::uint64_t run_t = measure_cost(parity, px, RecFn::Run, t);
        std::uint64_t run_t1 = measure_cost(parity, px, RecFn::Run, t + 1);
        std::uint64_t state_t = measure_cost(parity, px, RecFn::State, t);
        CHECK(run_t <= state_t + run_t1 + 1);
    }
}

TEST_CASE("cost_bound dominates measurements and doubles twice per step") {
    TuringMachine tm = builtin_tm("parity");
    auto x = sym("1");
    std::uint64_t v3 = std::max(measure_cost(tm, x, RecFn::State, 3),
                                measure_cost(tm, x, RecFn::Pos, 3));
    CostBound b3 = cost_bound(3);
    CHECK(static_cast<unsigned __int128>(v3) <= b3.v);

    CostBound b0 = cost_bound(0);
    CHECK(b0.v == 1);
    CHECK(b0.c == 1);

    // The bound-table growth ratio approaches 4.
    for (std::uint64_t t : {20ull, 30ull, 40ull}) {
        CostBound a = cost_bound(t);
        CostBound b = cost_bound(t + 1);
        double ratio = static_cast<double>(b.v) / static_cast<double>(a.v);
        CHECK(ratio > 3.95);
        CHECK(ratio < 4.05);
    }
    CHECK_THROWS_AS(cost_bound(100'000), std::overflow_error);
}

TEST_CASE("generator rejects malformed frames") {
    RecTmGenerator gen(builtin_tm("parity"), false);
    CHECK_THROWS_AS(gen(TokenSeq{"BOGUS"}), GeneratorError);
    CHECK_THROWS_AS(gen(TokenSeq{"STATE", "<sep>", "1"}), GeneratorError);
    RunResult r = run(TokenSeq{"BOGUS"},
                      [&gen](const TokenSeq& v) { return gen(v); },
                      RunConfig{});
    CHECK(!r.is_answer());
    CHECK(r.reason == BottomReason::MalformedOutput);
}
