#include <doctest.h>

#include <random>

#include "recur/builtin_machines.hpp"
#include "recur/turing.hpp"

using namespace recur;

namespace {

std::vector<Symbol> sym(const std::string& s) {
    std::vector<Symbol> out;
    for (char c : s)
        out.push_back(std::string(1, c));
    return out;
}

// Exhaustive binary strings of length up to n.
std::vector<std::string> binary_strings(std::size_t max_len) {
    std::vector<std::string> out{""};
    for (std::size_t len = 1; len <= max_len; ++len) {
        for (std::size_t v = 0; v < (1u << len); ++v) {
            std::string s;
            for (std::size_t i = 0; i < len; ++i)
                s += ((v >> i) & 1) ? '1' : '0';
            out.push_back(s);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("descriptor parse/render identity") {
    for (const std::string& name : builtin_machine_names()) {
        const std::string& text = builtin_machine_text(name);
        if (descriptor_type(text) == "tm") {
            TuringMachine m = parse_tm(text);
            TuringMachine again = parse_tm(render_tm(m));
            CHECK(again.alphabet == m.alphabet);
            CHECK(again.states == m.states);
            CHECK(again.delta == m.delta);
            CHECK(again.accepting == m.accepting);
        } else {
            AlternatingTM m = parse_atm(text);
            AlternatingTM again = parse_atm(render_atm(m));
            CHECK(again.delta == m.delta);
            CHECK(again.existential == m.existential);
            CHECK(again.universal == m.universal);
        }
    }
}

TEST_CASE("descriptor validation errors") {
    CHECK_THROWS_AS(parse_tm("type: tm\n"), MachineError);
    // delta not total
    CHECK_THROWS_AS(parse_tm("type: tm\nalphabet: 0 _\nblank: _\n"
                             "states: a acc rej\ninitial: a\naccept: acc\n"
                             "reject: rej\ndelta: a 0 -> a 0 +1\n"),
                    MachineError);
    // transitions from halting states are implicit
    CHECK_THROWS_AS(parse_tm("type: tm\nalphabet: 0 _\nblank: _\n"
                             "states: acc rej\ninitial: acc\naccept: acc\n"
                             "reject: rej\ndelta: acc 0 -> acc 0 0\n"),
                    MachineError);
}

TEST_CASE("step_tm: halting configurations self-loop") {
    TuringMachine m = builtin_tm("parity");
    Configuration c;
    c.state = "acc";
    c.tape[0] = "1";
    c.head = 0;
    CHECK(step_tm(m, c) == c);
}

TEST_CASE("step_tm: parity flips state and moves right on 1") {
    TuringMachine m = builtin_tm("parity");
    Configuration c = initial_configuration(m.initial, sym("1"));
    Configuration next = step_tm(m, c);
    CHECK(next.state == "odd");
    CHECK(next.head == 1);
}

TEST_CASE("step_tm: writer machine leaves tau(0)='1'") {
    TuringMachine w = parse_tm(
        "type: tm\nalphabet: 1 _\nblank: _\nstates: w acc rej\ninitial: w\n"
        "accept: acc\nreject: rej\ndelta: w _ -> acc 1 0\ndelta: w 1 -> acc "
        "1 0\n");
    TmRunResult r = run_tm(w, {}, 10);
    CHECK(r.verdict == Verdict::Accept);
    CHECK(r.final_config.tape.at(0) == "1");
    CHECK(r.time == 1);
}

TEST_CASE("run_tm: parity fixture") {
    TuringMachine m = builtin_tm("parity");
    CHECK(run_tm(m, sym("11"), 100).verdict == Verdict::Accept);
    CHECK(run_tm(m, sym("1"), 100).verdict == Verdict::Reject);
    TmRunResult empty = run_tm(m, {}, 100);
    CHECK(empty.verdict == Verdict::Accept);
    CHECK(empty.time == 1);  // one blank read into acc

    // Space counts distinct cells visited, monotone in input length.
    CHECK(run_tm(m, sym("101"), 100).space == 4);
}

TEST_CASE("run_tm: timeout verdict") {
    TuringMachine m = builtin_tm("toggler");
    CHECK(run_tm(m, sym("1"), 50).verdict == Verdict::Timeout);
}

TEST_CASE("run_tm: rejects blank in input") {
    TuringMachine m = builtin_tm("parity");
    CHECK_THROWS_AS(run_tm(m, {"_"}, 10), MachineError);
}

TEST_CASE("run_tm: palindrome fixture matches string reversal") {
    TuringMachine m = builtin_tm("palindrome");
    for (const std::string& s : binary_strings(7)) {
        std::string rev(s.rbegin(), s.rend());
        Verdict want = (s == rev) ? Verdict::Accept : Verdict::Reject;
        CAPTURE(s);
        CHECK(run_tm(m, sym(s), 10'000).verdict == want);
    }
}

TEST_CASE("run_tm: increment fixture computes value+1") {
    TuringMachine m = builtin_tm("increment");
    for (const std::string& s : binary_strings(6)) {
        if (s.empty())
            continue;
        TmRunResult r = run_tm(m, sym(s), 1'000);
        bool all_ones = s.find('0') == std::string::npos;
        CAPTURE(s);
        if (all_ones) {
            CHECK(r.verdict == Verdict::Reject);
            continue;
        }
        REQUIRE(r.verdict == Verdict::Accept);
        unsigned long v = std::stoul(s, nullptr, 2);
        std::string out;
        for (std::size_t i = 0; i < s.size(); ++i) {
            auto it = r.final_config.tape.find(static_cast<std::int64_t>(i));
            out += it == r.final_config.tape.end() ? "_" : it->second;
        }
        CHECK(std::stoul(out, nullptr, 2) == v + 1);
    }
}

TEST_CASE("run_tm: countdown accepts even values") {
    TuringMachine m = builtin_tm("countdown");
    for (const std::string& s : binary_strings(6)) {
        if (s.empty())
            continue;
        unsigned long v = std::stoul(s, nullptr, 2);
        Verdict want = (v % 2 == 0) ? Verdict::Accept : Verdict::Reject;
        CAPTURE(s);
        CHECK(run_tm(m, sym(s), 100'000).verdict == want);
    }
}

TEST_CASE("win_value: base cases and AND semantics") {
    AlternatingTM m = normalize_atm(builtin_atm("all_ones"));
    Configuration acc;
    acc.state = *m.accepting.begin();
    CHECK(win_value(m, acc, 100) == 1);
    Configuration rej;
    rej.state = *m.rejecting.begin();
    CHECK(win_value(m, rej, 100) == 0);

    // A universal configuration whose successors disagree evaluates to 0:
    // all_ones on "10" fails at the second cell.
    CHECK(win_value(m, initial_configuration(m.initial, sym("10")), 1000) ==
          0);
    CHECK(win_value(m, initial_configuration(m.initial, sym("11")), 1000) ==
          1);
}

TEST_CASE("win_value: exists_one fixture") {
    AlternatingTM m = normalize_atm(builtin_atm("exists_one"));
    for (const std::string& s : binary_strings(4)) {
        int want = s.find('1') != std::string::npos ? 1 : 0;
        CAPTURE(s);
        CHECK(win_value(m, initial_configuration(m.initial, sym(s)), 4096) ==
              want);
    }
}

TEST_CASE("win_value: order swap does not change the value") {
    AlternatingTM m = normalize_atm(builtin_atm("exists_one"));
    for (const std::string& s : binary_strings(4)) {
        Configuration c = initial_configuration(m.initial, sym(s));
        CHECK(win_value(m, c, 4096) == win_value(m, c, 4096, true));
    }
}

TEST_CASE("win_value: budget and cycle errors") {
    AlternatingTM m = normalize_atm(builtin_atm("exists_one"));
    Configuration c = initial_configuration(m.initial, sym("0000"));
    CHECK_THROWS_AS(win_value(m, c, 3), MachineError);

    // A self-looping machine is not a decider.
    AlternatingTM loop = parse_atm(
        "type: atm\nalphabet: 0 _\nblank: _\nstates: a acc rej\n"
        "initial: a\naccept: acc\nreject: rej\nexists: a\n"
        "delta: a 0 -> a 0 0\ndelta: a _ -> a _ 0\n");
    AlternatingTM nloop = normalize_atm(loop);
    CHECK_THROWS_AS(
        win_value(nloop, initial_configuration(nloop.initial, {}), 100),
        MachineError);
}

TEST_CASE("normalize_atm: padding rules") {
    // One existential successor: the second goes to a rejecting sink.
    AlternatingTM m = parse_atm(
        "type: atm\nalphabet: 0 _\nblank: _\nstates: a acc rej\n"
        "initial: a\naccept: acc\nreject: rej\nexists: a\n"
        "delta: a 0 -> acc 0 0\n");
    AlternatingTM n = normalize_atm(m);
    auto& succs = n.delta.at({"a", "0"});
    REQUIRE(succs.size() == 2);
    bool has_rej_pad = false;
    for (const TmTransition& tr : succs)
        if (n.rejecting.count(tr.next) && tr.write == "0" && tr.move == 0)
            has_rej_pad = true;
    CHECK(has_rej_pad);

    // Universal states pad with an accepting sink.
    AlternatingTM u = parse_atm(
        "type: atm\nalphabet: 0 _\nblank: _\nstates: a acc rej\n"
        "initial: a\naccept: acc\nreject: rej\nforall: a\n"
        "delta: a 0 -> rej 0 0\n");
    AlternatingTM nu = normalize_atm(u);
    bool has_acc_pad = false;
    for (const TmTransition& tr : nu.delta.at({"a", "0"}))
        if (nu.accepting.count(tr.next) && tr.write == "0" && tr.move == 0)
            has_acc_pad = true;
    CHECK(has_acc_pad);
}

TEST_CASE("normalize_atm: already-binary relations keep their successors") {
    AlternatingTM m = builtin_atm("exists_one");
    AlternatingTM n = normalize_atm(m);
    CHECK(n.delta.at({"walk", "0"}) == m.delta.at({"walk", "0"}));
    CHECK(n.delta.at({"walk", "1"}) == m.delta.at({"walk", "1"}));
}

TEST_CASE("normalize_atm: cascades preserve the win value") {
    // Three existential successors on one symbol.
    AlternatingTM m = parse_atm(
        "type: atm\nalphabet: 0 1 _\nblank: _\nstates: a b acc rej\n"
        "initial: a\naccept: acc\nreject: rej\nexists: a b\n"
        "delta: a 0 -> rej 0 0\ndelta: a 0 -> b 1 +1\ndelta: a 0 -> rej 1 0\n"
        "delta: a 1 -> acc 1 0\ndelta: a 1 -> rej 1 0\n"
        "delta: a _ -> rej _ 0\n"
        "delta: b 0 -> acc 0 0\ndelta: b 1 -> acc 1 0\ndelta: b _ -> rej _ "
        "0\n");
    AlternatingTM n = normalize_atm(m);
    for (auto& [key, succs] : n.delta)
        CHECK(succs.size() == 2);
    // Original semantics: on "0", a can take the b-branch which accepts.
    CHECK(win_value(n, initial_configuration(n.initial, sym("01")), 4096) ==
          1);
}

TEST_CASE("bool_eval fixture evaluates prefix formulas") {
    AlternatingTM m = normalize_atm(builtin_atm("bool_eval"));
    auto eval_direct = [&](const std::string& s) {
        return win_value(m, initial_configuration(m.initial, sym(s)), 65536);
    };
    CHECK(eval_direct("1") == 1);
    CHECK(eval_direct("0") == 0);
    CHECK(eval_direct("&11") == 1);
    CHECK(eval_direct("&10") == 0);
    CHECK(eval_direct("|00") == 0);
    CHECK(eval_direct("|01") == 1);
    CHECK(eval_direct("&|011") == 1);
    CHECK(eval_direct("|&000") == 0);
    // malformed inputs reject
    CHECK(eval_direct("") == 0);
    CHECK(eval_direct("11") == 0);
    CHECK(eval_direct("&1") == 0);
}
