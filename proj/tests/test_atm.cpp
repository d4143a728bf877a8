#include <doctest.h>

#include <random>

#include "recur/atm_eval.hpp"
#include "recur/builtin_machines.hpp"

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

Configuration random_config(std::mt19937_64& rng, const State& q,
                            const std::vector<Symbol>& symbols,
                            const Symbol& blank) {
    Configuration c;
    c.state = q;
    std::uniform_int_distribution<int> span(0, 6);
    std::uniform_int_distribution<int> offset(-5, 5);
    int lo = offset(rng);
    int n = span(rng);
    std::uniform_int_distribution<std::size_t> pick(0, symbols.size() - 1);
    for (int i = 0; i < n; ++i) {
        Symbol s = symbols[pick(rng)];
        if (s != blank)
            c.tape[lo + i] = s;
    }
    c.head = offset(rng);
    return c;
}

}  // namespace

TEST_CASE("update token text round-trips") {
    UpdateToken u{"q1", "a", +1};
    CHECK(render_update(u) == "(q1,a,+1)");
    CHECK(parse_update(render_update(u)) == u);
    CHECK(parse_update("(walk,_,-1)") == UpdateToken{"walk", "_", -1});
    CHECK_THROWS_AS(parse_update("walk"), GeneratorError);
    CHECK_THROWS_AS(parse_update("(a,b)"), GeneratorError);
}

TEST_CASE("apply_update follows the definition") {
    Configuration blank = blank_configuration("q0");
    Configuration c = apply_update(blank, {"q1", "a", +1}, "_");
    CHECK(c.state == "q1");
    CHECK(c.tape.at(0) == "a");
    CHECK(c.head == 1);

    Configuration d = apply_update(blank, {"q1", "a", 0}, "_");
    CHECK(d.head == 0);  // d=0 leaves the head fixed

    // writing the blank erases the cell from the sparse tape
    Configuration e = apply_update(c, {"q2", "_", -1}, "_");
    CHECK(e.tape.count(1) == 0);
}

TEST_CASE("embed of the blank configuration is a single stay token") {
    TokenSeq z = embed_config(blank_configuration("q0"), "_");
    CHECK(z == TokenSeq{"(q0,_,0)"});
}

TEST_CASE("fold of the embedding recovers the configuration") {
    std::mt19937_64 rng(7);
    std::vector<Symbol> symbols{"0", "1", "_"};
    for (int i = 0; i < 500; ++i) {
        Configuration c = random_config(rng, "q0", symbols, "_");
        TokenSeq z = embed_config(c, "_");
        Configuration folded =
            fold_updates(blank_configuration("q0"), z, "_");
        CAPTURE(i);
        CHECK(translationally_equivalent(folded, c));
    }
}

TEST_CASE("canon is idempotent on embeddings") {
    std::mt19937_64 rng(11);
    std::vector<Symbol> symbols{"0", "1", "_"};
    for (int i = 0; i < 200; ++i) {
        Configuration c = random_config(rng, "q0", symbols, "_");
        TokenSeq z = embed_config(c, "_");
        CHECK(canon_updates(z, "q0", "_") == z);
    }
    CHECK(canon_updates({}, "q0", "_") ==
          embed_config(blank_configuration("q0"), "_"));
}

TEST_CASE("canon of embed + transition equals embed of the successor") {
    AlternatingTM m = normalize_atm(builtin_atm("exists_one"));
    std::vector<Configuration> pool{
        initial_configuration(m.initial, sym("011"))};
    for (std::size_t i = 0; i < pool.size() && pool.size() < 64; ++i) {
        if (m.is_halting(pool[i].state))
            continue;
        auto succs = atm_successors(m, pool[i]);
        auto it = m.delta.find({pool[i].state, pool[i].read(m.blank)});
        REQUIRE(it != m.delta.end());
        for (std::size_t k = 0; k < succs.size(); ++k) {
            const TmTransition& tr = it->second[k];
            TokenSeq walk = embed_config(pool[i], m.blank);
            walk.push_back(render_update({tr.next, tr.write, tr.move}));
            CHECK(canon_updates(walk, m.initial, m.blank) ==
                  embed_config(succs[k], m.blank));
            pool.push_back(succs[k]);
        }
    }
}

TEST_CASE("translational equivalence") {
    Configuration a;
    a.state = "q";
    a.tape = {{0, "1"}, {2, "0"}};
    a.head = 1;
    Configuration b = a;
    // shift by 3
    b.tape = {{3, "1"}, {5, "0"}};
    b.head = 4;
    CHECK(translationally_equivalent(a, b));

    Configuration c = a;
    c.state = "r";
    CHECK(!translationally_equivalent(a, c));

    Configuration d = a;
    d.head = 2;
    CHECK(!translationally_equivalent(a, d));
}

TEST_CASE("eval generator base cases") {
    AlternatingTM m = normalize_atm(builtin_atm("exists_one"));
    AtmEvalGenerator gen(m);

    Configuration acc;
    acc.state = *m.accepting.begin();
    TokenSeq out = gen(embed_config(acc, m.blank));
    CHECK(out == TokenSeq{tok::RetOpen, tok::Sep, "1", tok::RetClose});

    // universal state with bits 1,0 combines to 0
    AlternatingTM all = normalize_atm(builtin_atm("all_ones"));
    AtmEvalGenerator agen(all);
    Configuration u = initial_configuration(all.initial, sym("1"));
    TokenSeq frame = embed_config(u, all.blank);
    frame.push_back(tok::Sep);
    frame.push_back("1");
    frame.push_back(tok::Sep);
    frame.push_back("0");
    out = agen(frame);
    CHECK(out == TokenSeq{tok::RetOpen, tok::Sep, "0", tok::RetClose});
}

TEST_CASE("eval through the runtime equals win_value on fixtures") {
    for (const char* name : {"exists_one", "all_ones", "bool_eval"}) {
        AlternatingTM raw = builtin_atm(name);
        AlternatingTM m = normalize_atm(raw);
        std::vector<std::string> inputs;
        if (std::string(name) == "bool_eval")
            inputs = {"", "0", "1", "&11", "&10", "|01", "&|011", "11"};
        else
            inputs = binary_strings(4);
        for (const std::string& s : inputs) {
            std::vector<Symbol> x;
            for (char c : s)
                x.push_back(std::string(1, c));
            int direct =
                win_value(m, initial_configuration(m.initial, x), 1u << 16);
            AtmEvalResult r = eval_atm(raw, x);
            CAPTURE(name);
            CAPTURE(s);
            REQUIRE(r.run.is_answer());
            CHECK(r.value == direct);
            CHECK(r.run.trace.max_depth <= (std::size_t{1} << 16));
        }
    }
}

TEST_CASE("eval frames stay within the embedding cap") {
    AlternatingTM m = normalize_atm(builtin_atm("all_ones"));
    auto x = sym("1011");
    // N bounds |embed| over reachable configurations; frames add at most the
    // two result bits and their separators.
    std::size_t n_cap = 0;
    std::size_t max_frame = 0;
    RunConfig cfg = default_atm_run_config();
    cfg.observer = [&](const StepEvent& e) {
        for (const TokenSeq& f : e.stack.frames())
            max_frame = std::max(max_frame, f.size());
    };
    AtmEvalResult r = eval_atm(m, x, cfg);
    REQUIRE(r.run.is_answer());
    // recompute the reachable-embed bound directly
    std::vector<Configuration> pool{initial_configuration(m.initial, x)};
    for (std::size_t i = 0; i < pool.size() && pool.size() < 4096; ++i) {
        n_cap = std::max(n_cap, embed_config(pool[i], m.blank).size());
        if (!m.is_halting(pool[i].state))
            for (Configuration& s : atm_successors(m, pool[i]))
                pool.push_back(std::move(s));
    }
    CHECK(max_frame <= n_cap + 4);
}
