#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace recur {

using Symbol = std::string;
using State = std::string;

struct MachineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TmTransition {
    State next;
    Symbol write;
    int move = 0;  // -1, 0, +1

    bool operator==(const TmTransition&) const = default;
    auto operator<=>(const TmTransition&) const = default;
};

// Single-tape deterministic machine. Halting states self-loop; the loops are
// synthesized at load time and never written in descriptor files.
struct TuringMachine {
    std::string name;
    std::vector<Symbol> alphabet;  // includes blank
    Symbol blank;
    std::vector<State> states;
    State initial;
    std::set<State> accepting;
    std::set<State> rejecting;
    std::map<std::pair<State, Symbol>, TmTransition> delta;

    bool is_halting(const State& q) const {
        return accepting.count(q) != 0 || rejecting.count(q) != 0;
    }
    const TmTransition& transition(const State& q, const Symbol& a) const;
    void validate() const;
};

struct AlternatingTM {
    std::string name;
    std::vector<Symbol> alphabet;
    Symbol blank;
    std::vector<State> states;
    State initial;
    std::set<State> accepting;
    std::set<State> rejecting;
    std::set<State> existential;
    std::set<State> universal;
    // Successor tuples per (state, symbol), kept sorted by (next, write, move)
    // so Succ_0/Succ_1 are well-defined. Duplicates are legal (padding).
    std::map<std::pair<State, Symbol>, std::vector<TmTransition>> delta;

    bool is_halting(const State& q) const {
        return accepting.count(q) != 0 || rejecting.count(q) != 0;
    }
    bool is_existential(const State& q) const {
        return existential.count(q) != 0;
    }
    void validate() const;
};

// (state, tape, head); the tape map never stores explicit blanks.
struct Configuration {
    State state;
    std::map<std::int64_t, Symbol> tape;
    std::int64_t head = 0;

    Symbol read(const Symbol& blank) const;
    void write(std::int64_t pos, Symbol sym, const Symbol& blank);
    bool operator==(const Configuration&) const = default;
};

Configuration initial_configuration(const State& q0,
                                    const std::vector<Symbol>& input);

// One transition of a deterministic machine (identity on halting states).
Configuration step_tm(const TuringMachine& tm, const Configuration& c);

enum class Verdict { Accept, Reject, Timeout };
const char* to_string(Verdict v);

struct TmRunResult {
    Verdict verdict = Verdict::Timeout;
    std::uint64_t time = 0;    // steps executed before halting
    std::size_t space = 0;     // distinct tape cells visited by the head
    Configuration final_config;
};

// Direct simulation from the standard initial configuration. Input symbols
// must lie in alphabet minus blank.
TmRunResult run_tm(const TuringMachine& tm, const std::vector<Symbol>& input,
                   std::uint64_t max_steps);

// Optional hook: called with each configuration visited (including the
// initial and final ones).
TmRunResult run_tm(const TuringMachine& tm, const std::vector<Symbol>& input,
                   std::uint64_t max_steps,
                   const std::function<void(const Configuration&)>& on_config);

// Successor configurations of a (normalized or raw) ATM configuration, in
// the canonical (next, write, move) order.
std::vector<Configuration> atm_successors(const AlternatingTM& atm,
                                          const Configuration& c);

// Pads every non-halting (state, symbol) to exactly two successors: missing
// branches go to a rejecting sink for existential states and an accepting
// sink for universal states; fanout beyond two is reduced by a balanced
// binary cascade through fresh states of the same alternation type.
AlternatingTM normalize_atm(const AlternatingTM& atm);

// Game value of a configuration: halting gives 1/0, existential states OR
// their two successors, universal states AND them. Both successors are
// always evaluated. `budget` bounds the number of distinct configurations;
// exceeding it, or revisiting an in-progress configuration (a cycle), throws
// MachineError. `swap_order` evaluates Succ_1 before Succ_0.
int win_value(const AlternatingTM& atm, const Configuration& c,
              std::size_t budget, bool swap_order = false);

// ---- descriptor text format ----
//
//   # comment
//   type: tm | atm
//   name: parity
//   alphabet: 0 1 _
//   blank: _
//   states: q0 q1 acc rej
//   initial: q0
//   accept: acc
//   reject: rej
//   exists: q0        (atm only)
//   forall: q1        (atm only)
//   delta: q0 0 -> q0 0 +1
//
// parse(render(m)) == m for every valid machine value.
TuringMachine parse_tm(const std::string& text);
AlternatingTM parse_atm(const std::string& text);
std::string render_tm(const TuringMachine& tm);
std::string render_atm(const AlternatingTM& atm);
// "tm" or "atm" from the type line.
std::string descriptor_type(const std::string& text);

// Splits an input string into tape symbols: whitespace-separated when spaces
// are present, per-character otherwise. Throws on symbols outside
// alphabet minus blank.
std::vector<Symbol> parse_tape_input(const std::vector<Symbol>& alphabet,
                                     const Symbol& blank,
                                     const std::string& text);

}  // namespace recur
