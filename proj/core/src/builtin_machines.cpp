#include "recur/builtin_machines.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace recur {

namespace {

// Accepts inputs over {0,1} with an even number of 1s. Halts in n+1 steps.
const std::string kParity = R"(type: tm
name: parity
alphabet: 0 1 _
blank: _
states: even odd acc rej
initial: even
accept: acc
reject: rej
delta: even 0 -> even 0 +1
delta: even 1 -> odd 1 +1
delta: even _ -> acc _ 0
delta: odd 0 -> odd 0 +1
delta: odd 1 -> even 1 +1
delta: odd _ -> rej _ 0
)";

// Increments an MSB-first binary number in place; accepts unless the carry
// overflows past the left edge (all-ones input).
const std::string kIncrement = R"(type: tm
name: increment
alphabet: 0 1 _
blank: _
states: seek carry acc rej
initial: seek
accept: acc
reject: rej
delta: seek 0 -> seek 0 +1
delta: seek 1 -> seek 1 +1
delta: seek _ -> carry _ -1
delta: carry 1 -> carry 0 -1
delta: carry 0 -> acc 1 0
delta: carry _ -> rej _ 0
)";

// Erases matching end symbols until the middle; quadratic time.
const std::string kPalindrome = R"(type: tm
name: palindrome
alphabet: 0 1 _
blank: _
states: start have0 have1 check0 check1 back acc rej
initial: start
accept: acc
reject: rej
delta: start 0 -> have0 _ +1
delta: start 1 -> have1 _ +1
delta: start _ -> acc _ 0
delta: have0 0 -> have0 0 +1
delta: have0 1 -> have0 1 +1
delta: have0 _ -> check0 _ -1
delta: have1 0 -> have1 0 +1
delta: have1 1 -> have1 1 +1
delta: have1 _ -> check1 _ -1
delta: check0 0 -> back _ -1
delta: check0 1 -> rej 1 0
delta: check0 _ -> acc _ 0
delta: check1 1 -> back _ -1
delta: check1 0 -> rej 0 0
delta: check1 _ -> acc _ 0
delta: back 0 -> back 0 -1
delta: back 1 -> back 1 -1
delta: back _ -> start _ +1
)";

// Repeatedly decrements an MSB-first binary value until it reaches zero;
// accepts iff the value (= the number of decrements) is even. Runtime is
// Theta(value * n) with the head confined to the input cells, which keeps
// cell-revisit intervals bounded.
const std::string kCountdown = R"(type: tm
name: countdown
alphabet: 0 1 _
blank: _
states: scanE scanO goE goO decE decO retE retO acc rej
initial: scanE
accept: acc
reject: rej
delta: scanE 0 -> scanE 0 +1
delta: scanE 1 -> goE 1 +1
delta: scanE _ -> acc _ 0
delta: scanO 0 -> scanO 0 +1
delta: scanO 1 -> goO 1 +1
delta: scanO _ -> rej _ 0
delta: goE 0 -> goE 0 +1
delta: goE 1 -> goE 1 +1
delta: goE _ -> decE _ -1
delta: goO 0 -> goO 0 +1
delta: goO 1 -> goO 1 +1
delta: goO _ -> decO _ -1
delta: decE 0 -> decE 1 -1
delta: decE 1 -> retO 0 -1
delta: decE _ -> rej _ 0
delta: decO 0 -> decO 1 -1
delta: decO 1 -> retE 0 -1
delta: decO _ -> rej _ 0
delta: retE 0 -> retE 0 -1
delta: retE 1 -> retE 1 -1
delta: retE _ -> scanE _ +1
delta: retO 0 -> retO 0 -1
delta: retO 1 -> retO 1 -1
delta: retO _ -> scanO _ +1
)";

// Rewrites cell 0 forever without moving. Never halts; used to measure the
// worst-case invocation recurrences, where the head re-reads the cell it
// just wrote.
const std::string kToggler = R"(type: tm
name: toggler
alphabet: 0 1 _
blank: _
states: a b acc rej
initial: a
accept: acc
reject: rej
delta: a 0 -> b 1 0
delta: a 1 -> b 0 0
delta: a _ -> b 1 0
delta: b 0 -> a 1 0
delta: b 1 -> a 0 0
delta: b _ -> a 1 0
)";

// Existential walk: accepts iff some input cell holds 1.
const std::string kExistsOne = R"(type: atm
name: exists_one
alphabet: 0 1 _
blank: _
states: walk probe acc rej
initial: walk
accept: acc
reject: rej
exists: walk probe
delta: walk 0 -> walk 0 +1
delta: walk 0 -> probe 0 0
delta: walk 1 -> walk 1 +1
delta: walk 1 -> probe 1 0
delta: walk _ -> rej _ 0
delta: probe 0 -> rej 0 0
delta: probe 1 -> acc 1 0
delta: probe _ -> rej _ 0
)";

// Universal walk: accepts iff every input cell holds 1.
const std::string kAllOnes = R"(type: atm
name: all_ones
alphabet: 0 1 _
blank: _
states: walk probe acc rej
initial: walk
accept: acc
reject: rej
forall: walk probe
delta: walk 0 -> walk 0 +1
delta: walk 0 -> probe 0 0
delta: walk 1 -> walk 1 +1
delta: walk 1 -> probe 1 0
delta: walk _ -> acc _ 0
delta: probe 0 -> rej 0 0
delta: probe 1 -> acc 1 0
delta: probe _ -> acc _ 0
)";

// Evaluates a prefix-notation Boolean formula over tokens & | 0 1, e.g.
// "&|011" = (0|1)&1. Repeatedly rewrites the rightmost operator with the
// value of its two operand constants (consumed cells become x). Accepts iff
// the formula evaluates to 1; malformed inputs reject. Deterministic, so the
// alternation is vacuous and normalization pads the second successors.
const std::string kBoolEval = R"(type: atm
name: bool_eval
alphabet: & | 0 1 x _
blank: _
states: seek rfind andc1 orc1 and20 and21 or20 or21 put0 put1 fin last0 last1 acc rej
initial: seek
accept: acc
reject: rej
exists: seek rfind andc1 orc1 and20 and21 or20 or21 put0 put1 fin last0 last1
delta: seek & -> seek & +1
delta: seek | -> seek | +1
delta: seek 0 -> seek 0 +1
delta: seek 1 -> seek 1 +1
delta: seek x -> seek x +1
delta: seek _ -> rfind _ -1
delta: rfind 0 -> rfind 0 -1
delta: rfind 1 -> rfind 1 -1
delta: rfind x -> rfind x -1
delta: rfind & -> andc1 & +1
delta: rfind | -> orc1 | +1
delta: rfind _ -> fin _ +1
delta: andc1 x -> andc1 x +1
delta: andc1 0 -> and20 x +1
delta: andc1 1 -> and21 x +1
delta: andc1 & -> rej & 0
delta: andc1 | -> rej | 0
delta: andc1 _ -> rej _ 0
delta: orc1 x -> orc1 x +1
delta: orc1 0 -> or20 x +1
delta: orc1 1 -> or21 x +1
delta: orc1 & -> rej & 0
delta: orc1 | -> rej | 0
delta: orc1 _ -> rej _ 0
delta: and20 x -> and20 x +1
delta: and20 0 -> put0 x -1
delta: and20 1 -> put0 x -1
delta: and20 & -> rej & 0
delta: and20 | -> rej | 0
delta: and20 _ -> rej _ 0
delta: and21 x -> and21 x +1
delta: and21 0 -> put0 x -1
delta: and21 1 -> put1 x -1
delta: and21 & -> rej & 0
delta: and21 | -> rej | 0
delta: and21 _ -> rej _ 0
delta: or20 x -> or20 x +1
delta: or20 0 -> put0 x -1
delta: or20 1 -> put1 x -1
delta: or20 & -> rej & 0
delta: or20 | -> rej | 0
delta: or20 _ -> rej _ 0
delta: or21 x -> or21 x +1
delta: or21 0 -> put1 x -1
delta: or21 1 -> put1 x -1
delta: or21 & -> rej & 0
delta: or21 | -> rej | 0
delta: or21 _ -> rej _ 0
delta: put0 x -> put0 x -1
delta: put0 & -> seek 0 +1
delta: put0 | -> seek 0 +1
delta: put0 0 -> rej 0 0
delta: put0 1 -> rej 1 0
delta: put0 _ -> rej _ 0
delta: put1 x -> put1 x -1
delta: put1 & -> seek 1 +1
delta: put1 | -> seek 1 +1
delta: put1 0 -> rej 0 0
delta: put1 1 -> rej 1 0
delta: put1 _ -> rej _ 0
delta: fin x -> fin x +1
delta: fin 0 -> last0 0 +1
delta: fin 1 -> last1 1 +1
delta: fin & -> rej & 0
delta: fin | -> rej | 0
delta: fin _ -> rej _ 0
delta: last0 x -> last0 x +1
delta: last0 _ -> rej _ 0
delta: last0 0 -> rej 0 0
delta: last0 1 -> rej 1 0
delta: last0 & -> rej & 0
delta: last0 | -> rej | 0
delta: last1 x -> last1 x +1
delta: last1 _ -> acc _ 0
delta: last1 0 -> rej 0 0
delta: last1 1 -> rej 1 0
delta: last1 & -> rej & 0
delta: last1 | -> rej | 0
)";

const std::map<std::string, const std::string*>& registry() {
    static const std::map<std::string, const std::string*> reg = {
        {"parity", &kParity},       {"increment", &kIncrement},
        {"palindrome", &kPalindrome}, {"countdown", &kCountdown},
        {"toggler", &kToggler},     {"exists_one", &kExistsOne},
        {"all_ones", &kAllOnes},    {"bool_eval", &kBoolEval},
    };
    return reg;
}

}  // namespace

std::vector<std::string> builtin_machine_names() {
    std::vector<std::string> names;
    for (const auto& [name, text] : registry())
        names.push_back(name);
    return names;
}

bool is_builtin_machine(const std::string& name) {
    return registry().count(name) != 0;
}

const std::string& builtin_machine_text(const std::string& name) {
    auto it = registry().find(name);
    if (it == registry().end())
        throw MachineError("unknown builtin machine '" + name + "'");
    return *it->second;
}

TuringMachine builtin_tm(const std::string& name) {
    return parse_tm(builtin_machine_text(name));
}

AlternatingTM builtin_atm(const std::string& name) {
    return parse_atm(builtin_machine_text(name));
}

std::string load_machine_text(const std::string& name_or_path) {
    if (is_builtin_machine(name_or_path))
        return builtin_machine_text(name_or_path);
    std::ifstream in(name_or_path);
    if (!in)
        throw MachineError("no builtin machine and no readable file named '" +
                           name_or_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace recur
