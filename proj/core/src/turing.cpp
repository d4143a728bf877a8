#include "recur/turing.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace recur {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w)
        out.push_back(w);
    return out;
}

int parse_move(const std::string& s) {
    if (s == "-1")
        return -1;
    if (s == "0")
        return 0;
    if (s == "+1" || s == "1")
        return 1;
    throw MachineError("bad move '" + s + "' (want -1, 0 or +1)");
}

const char* move_str(int d) {
    switch (d) {
    case -1: return "-1";
    case 0: return "0";
    case 1: return "+1";
    }
    throw MachineError("bad move value");
}

template <typename SetT, typename VecT>
void require_subset(const SetT& sub, const VecT& universe, const char* what) {
    for (const auto& x : sub) {
        if (std::find(universe.begin(), universe.end(), x) == universe.end())
            throw MachineError(std::string("undeclared ") + what + " '" + x +
                               "'");
    }
}

}  // namespace

const TmTransition& TuringMachine::transition(const State& q,
                                              const Symbol& a) const {
    auto it = delta.find({q, a});
    if (it == delta.end())
        throw MachineError("no transition for (" + q + ", " + a + ")");
    return it->second;
}

void TuringMachine::validate() const {
    if (alphabet.empty() || states.empty())
        throw MachineError("machine needs a non-empty alphabet and state set");
    if (std::find(alphabet.begin(), alphabet.end(), blank) == alphabet.end())
        throw MachineError("blank symbol not in alphabet");
    if (std::find(states.begin(), states.end(), initial) == states.end())
        throw MachineError("initial state not declared");
    require_subset(accepting, states, "accepting state");
    require_subset(rejecting, states, "rejecting state");
    for (const State& q : accepting)
        if (rejecting.count(q))
            throw MachineError("state '" + q + "' both accepts and rejects");
    for (const auto& [key, tr] : delta) {
        const auto& [q, a] = key;
        require_subset(std::vector<State>{q, tr.next}, states, "state");
        require_subset(std::vector<Symbol>{a, tr.write}, alphabet, "symbol");
    }
    // delta must be total on non-halting states (halting self-loops are
    // synthesized, so they are present too by the time validate runs).
    for (const State& q : states) {
        if (is_halting(q))
            continue;
        for (const Symbol& a : alphabet) {
            if (!delta.count({q, a}))
                throw MachineError("delta not total: missing (" + q + ", " +
                                   a + ")");
        }
    }
}

void AlternatingTM::validate() const {
    if (alphabet.empty() || states.empty())
        throw MachineError("machine needs a non-empty alphabet and state set");
    if (std::find(alphabet.begin(), alphabet.end(), blank) == alphabet.end())
        throw MachineError("blank symbol not in alphabet");
    if (std::find(states.begin(), states.end(), initial) == states.end())
        throw MachineError("initial state not declared");
    require_subset(accepting, states, "accepting state");
    require_subset(rejecting, states, "rejecting state");
    require_subset(existential, states, "existential state");
    require_subset(universal, states, "universal state");
    for (const State& q : states) {
        bool ex = existential.count(q) != 0;
        bool un = universal.count(q) != 0;
        if (is_halting(q)) {
            if (accepting.count(q) && rejecting.count(q))
                throw MachineError("state '" + q +
                                   "' both accepts and rejects");
            if (ex || un)
                throw MachineError("halting state '" + q +
                                   "' cannot carry an alternation label");
        } else if (ex == un) {
            throw MachineError("non-halting state '" + q +
                               "' must be exactly one of exists/forall");
        }
    }
    for (const auto& [key, succs] : delta) {
        const auto& [q, a] = key;
        if (is_halting(q))
            throw MachineError("halting state '" + q +
                               "' may not have transitions");
        require_subset(std::vector<State>{q}, states, "state");
        require_subset(std::vector<Symbol>{a}, alphabet, "symbol");
        for (const TmTransition& tr : succs) {
            require_subset(std::vector<State>{tr.next}, states, "state");
            require_subset(std::vector<Symbol>{tr.write}, alphabet, "symbol");
        }
        if (!std::is_sorted(succs.begin(), succs.end()))
            throw MachineError("successor list not in canonical order");
    }
}

Symbol Configuration::read(const Symbol& blank) const {
    auto it = tape.find(head);
    return it == tape.end() ? blank : it->second;
}

void Configuration::write(std::int64_t pos, Symbol sym, const Symbol& blank) {
    if (sym == blank)
        tape.erase(pos);
    else
        tape[pos] = std::move(sym);
}

Configuration initial_configuration(const State& q0,
                                    const std::vector<Symbol>& input) {
    Configuration c;
    c.state = q0;
    c.head = 0;
    for (std::size_t i = 0; i < input.size(); ++i)
        c.tape[static_cast<std::int64_t>(i)] = input[i];
    return c;
}

Configuration step_tm(const TuringMachine& tm, const Configuration& c) {
    if (tm.is_halting(c.state))
        return c;  // halting states self-loop
    const TmTransition& tr = tm.transition(c.state, c.read(tm.blank));
    Configuration next = c;
    next.state = tr.next;
    next.write(c.head, tr.write, tm.blank);
    next.head = c.head + tr.move;
    return next;
}

TmRunResult run_tm(const TuringMachine& tm, const std::vector<Symbol>& input,
                   std::uint64_t max_steps) {
    return run_tm(tm, input, max_steps, nullptr);
}

TmRunResult run_tm(
    const TuringMachine& tm, const std::vector<Symbol>& input,
    std::uint64_t max_steps,
    const std::function<void(const Configuration&)>& on_config) {
    for (const Symbol& s : input) {
        if (s == tm.blank ||
            std::find(tm.alphabet.begin(), tm.alphabet.end(), s) ==
                tm.alphabet.end())
            throw MachineError("input symbol '" + s +
                               "' not in alphabet minus blank");
    }
    TmRunResult res;
    Configuration c = initial_configuration(tm.initial, input);
    std::unordered_set<std::int64_t> visited{c.head};
    if (on_config)
        on_config(c);
    for (res.time = 0; res.time < max_steps; ++res.time) {
        if (tm.accepting.count(c.state)) {
            res.verdict = Verdict::Accept;
            break;
        }
        if (tm.rejecting.count(c.state)) {
            res.verdict = Verdict::Reject;
            break;
        }
        c = step_tm(tm, c);
        visited.insert(c.head);
        if (on_config)
            on_config(c);
    }
    res.space = visited.size();
    res.final_config = std::move(c);
    return res;
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Accept: return "accept";
    case Verdict::Reject: return "reject";
    case Verdict::Timeout: return "timeout";
    }
    return "?";
}

std::vector<Configuration> atm_successors(const AlternatingTM& atm,
                                          const Configuration& c) {
    std::vector<Configuration> out;
    auto it = atm.delta.find({c.state, c.read(atm.blank)});
    if (it == atm.delta.end())
        return out;
    for (const TmTransition& tr : it->second) {
        Configuration next = c;
        next.state = tr.next;
        next.write(c.head, tr.write, atm.blank);
        next.head = c.head + tr.move;
        out.push_back(std::move(next));
    }
    return out;
}

namespace {

State fresh_state(const AlternatingTM& m, std::set<State>& taken,
                  std::string base) {
    while (std::find(m.states.begin(), m.states.end(), base) !=
               m.states.end() ||
           taken.count(base))
        base += "'";
    taken.insert(base);
    return base;
}

}  // namespace

AlternatingTM normalize_atm(const AlternatingTM& atm) {
    atm.validate();
    AlternatingTM out = atm;
    std::set<State> taken;
    State acc_sink;
    State rej_sink;
    auto want_acc_sink = [&]() -> const State& {
        if (acc_sink.empty()) {
            if (!out.accepting.empty()) {
                acc_sink = *out.accepting.begin();
            } else {
                acc_sink = fresh_state(out, taken, "acc");
                out.states.push_back(acc_sink);
                out.accepting.insert(acc_sink);
            }
        }
        return acc_sink;
    };
    auto want_rej_sink = [&]() -> const State& {
        if (rej_sink.empty()) {
            if (!out.rejecting.empty()) {
                rej_sink = *out.rejecting.begin();
            } else {
                rej_sink = fresh_state(out, taken, "rej");
                out.states.push_back(rej_sink);
                out.rejecting.insert(rej_sink);
            }
        }
        return rej_sink;
    };

    // Reduce fanout > 2 by a balanced cascade of fresh same-type states, then
    // pad to exactly two successors everywhere.
    std::map<std::pair<State, Symbol>, std::vector<TmTransition>> work =
        out.delta;
    std::map<std::pair<State, Symbol>, std::vector<TmTransition>> result;
    std::vector<std::pair<State, bool>> pending_fill;  // fresh states to pad

    std::function<TmTransition(const Symbol&, bool,
                               std::vector<TmTransition>)>
        wrap = [&](const Symbol& a, bool existential,
                   std::vector<TmTransition> list) -> TmTransition {
        assert(!list.empty());
        if (list.size() == 1)
            return list[0];
        State m = fresh_state(out, taken,
                              "s" + std::to_string(out.states.size()));
        out.states.push_back(m);
        if (existential)
            out.existential.insert(m);
        else
            out.universal.insert(m);
        pending_fill.push_back({m, existential});
        std::size_t half = list.size() / 2;
        std::vector<TmTransition> left(list.begin(), list.begin() + half);
        std::vector<TmTransition> right(list.begin() + half, list.end());
        std::vector<TmTransition> pair_list{wrap(a, existential, left),
                                            wrap(a, existential, right)};
        std::sort(pair_list.begin(), pair_list.end());
        result[{m, a}] = pair_list;
        return {m, a, 0};  // write the symbol back, stay, descend
    };

    for (auto& [key, succs] : work) {
        const auto& [q, a] = key;
        bool ex = out.is_existential(q);
        std::vector<TmTransition> list = succs;
        std::sort(list.begin(), list.end());
        if (list.size() > 2) {
            std::size_t half = list.size() / 2;
            std::vector<TmTransition> left(list.begin(), list.begin() + half);
            std::vector<TmTransition> right(list.begin() + half, list.end());
            list = {wrap(a, ex, left), wrap(a, ex, right)};
        }
        while (list.size() < 2) {
            const State& sink = ex ? want_rej_sink() : want_acc_sink();
            list.push_back({sink, a, 0});
        }
        std::sort(list.begin(), list.end());
        result[key] = list;
    }

    // Missing (state, symbol) entries and the unreachable rows of cascade
    // states get the same padding rule.
    std::vector<std::pair<State, bool>> fill_targets;
    for (const State& q : out.states)
        if (!out.is_halting(q))
            fill_targets.push_back({q, out.is_existential(q)});
    for (const auto& [q, ex] : fill_targets) {
        for (const Symbol& a : out.alphabet) {
            auto& slot = result[{q, a}];
            while (slot.size() < 2) {
                const State& sink = ex ? want_rej_sink() : want_acc_sink();
                slot.push_back({sink, a, 0});
            }
            std::sort(slot.begin(), slot.end());
        }
    }

    out.delta = std::move(result);
    out.validate();
    return out;
}

namespace {

std::string config_key(const Configuration& c) {
    std::string key = c.state;
    key += '\x01';
    key += std::to_string(c.head);
    for (const auto& [pos, sym] : c.tape) {
        key += '\x01';
        key += std::to_string(pos);
        key += ':';
        key += sym;
    }
    return key;
}

}  // namespace

int win_value(const AlternatingTM& atm, const Configuration& c,
              std::size_t budget, bool swap_order) {
    std::unordered_map<std::string, int> memo;
    std::unordered_set<std::string> in_progress;

    std::function<int(const Configuration&)> eval =
        [&](const Configuration& cfg) -> int {
        std::string key = config_key(cfg);
        if (auto it = memo.find(key); it != memo.end())
            return it->second;
        if (in_progress.count(key))
            throw MachineError("configuration cycle: machine is not a decider");
        if (memo.size() + in_progress.size() >= budget)
            throw MachineError("win_value budget exceeded");
        if (atm.accepting.count(cfg.state)) {
            memo[key] = 1;
            return 1;
        }
        if (atm.rejecting.count(cfg.state)) {
            memo[key] = 0;
            return 0;
        }
        in_progress.insert(key);
        std::vector<Configuration> succs = atm_successors(atm, cfg);
        if (succs.size() != 2)
            throw MachineError("configuration without exactly two successors "
                               "(normalize the machine first)");
        int v0, v1;
        if (swap_order) {
            v1 = eval(succs[1]);
            v0 = eval(succs[0]);
        } else {
            v0 = eval(succs[0]);
            v1 = eval(succs[1]);
        }
        int v = atm.is_existential(cfg.state) ? (v0 | v1) : (v0 & v1);
        in_progress.erase(key);
        memo[key] = v;
        return v;
    };
    return eval(c);
}

// ---- descriptor format ----

namespace {

struct RawDescriptor {
    std::map<std::string, std::vector<std::string>> fields;
    std::vector<std::array<std::string, 5>> deltas;  // q a q' w d
};

RawDescriptor parse_raw(const std::string& text) {
    RawDescriptor raw;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos)
            line.resize(pos);
        std::vector<std::string> words = split_ws(line);
        if (words.empty())
            continue;
        std::string key = words[0];
        if (key.empty() || key.back() != ':')
            throw MachineError("line " + std::to_string(lineno) +
                               ": expected 'key:'");
        key.pop_back();
        words.erase(words.begin());
        if (key == "delta") {
            if (words.size() != 6 || words[2] != "->")
                throw MachineError("line " + std::to_string(lineno) +
                                   ": expected 'delta: q a -> q w d'");
            raw.deltas.push_back(
                {words[0], words[1], words[3], words[4], words[5]});
        } else {
            if (raw.fields.count(key))
                throw MachineError("duplicate field '" + key + "'");
            raw.fields[key] = words;
        }
    }
    return raw;
}

std::string single(const RawDescriptor& raw, const std::string& key) {
    auto it = raw.fields.find(key);
    if (it == raw.fields.end() || it->second.size() != 1)
        throw MachineError("field '" + key + "' must appear with one value");
    return it->second[0];
}

std::vector<std::string> list_field(const RawDescriptor& raw,
                                    const std::string& key, bool required) {
    auto it = raw.fields.find(key);
    if (it == raw.fields.end()) {
        if (required)
            throw MachineError("missing field '" + key + "'");
        return {};
    }
    return it->second;
}

void fill_common(const RawDescriptor& raw, std::vector<Symbol>& alphabet,
                 Symbol& blank, std::vector<State>& states, State& initial,
                 std::set<State>& accepting, std::set<State>& rejecting,
                 std::string& name) {
    auto nm = raw.fields.find("name");
    name = (nm != raw.fields.end() && !nm->second.empty()) ? nm->second[0]
                                                           : "";
    alphabet = list_field(raw, "alphabet", true);
    blank = single(raw, "blank");
    states = list_field(raw, "states", true);
    initial = single(raw, "initial");
    auto acc = list_field(raw, "accept", true);
    auto rej = list_field(raw, "reject", true);
    accepting = {acc.begin(), acc.end()};
    rejecting = {rej.begin(), rej.end()};
}

}  // namespace

std::string descriptor_type(const std::string& text) {
    return single(parse_raw(text), "type");
}

TuringMachine parse_tm(const std::string& text) {
    RawDescriptor raw = parse_raw(text);
    if (single(raw, "type") != "tm")
        throw MachineError("descriptor type is not 'tm'");
    TuringMachine tm;
    fill_common(raw, tm.alphabet, tm.blank, tm.states, tm.initial,
                tm.accepting, tm.rejecting, tm.name);
    for (const auto& [q, a, q2, w, d] : raw.deltas) {
        if (tm.is_halting(q))
            throw MachineError("halting state '" + q +
                               "' may not have transitions (self-loops are "
                               "implicit)");
        if (tm.delta.count({q, a}))
            throw MachineError("duplicate transition for (" + q + ", " + a +
                               ")");
        tm.delta[{q, a}] = {q2, w, parse_move(d)};
    }
    // Halting normalization: self-loops.
    for (const State& q : tm.states) {
        if (!tm.is_halting(q))
            continue;
        for (const Symbol& a : tm.alphabet)
            tm.delta[{q, a}] = {q, a, 0};
    }
    tm.validate();
    return tm;
}

AlternatingTM parse_atm(const std::string& text) {
    RawDescriptor raw = parse_raw(text);
    if (single(raw, "type") != "atm")
        throw MachineError("descriptor type is not 'atm'");
    AlternatingTM atm;
    fill_common(raw, atm.alphabet, atm.blank, atm.states, atm.initial,
                atm.accepting, atm.rejecting, atm.name);
    auto ex = list_field(raw, "exists", false);
    auto un = list_field(raw, "forall", false);
    atm.existential = {ex.begin(), ex.end()};
    atm.universal = {un.begin(), un.end()};
    for (const auto& [q, a, q2, w, d] : raw.deltas) {
        if (atm.is_halting(q))
            throw MachineError("halting state '" + q +
                               "' may not have transitions");
        atm.delta[{q, a}].push_back({q2, w, parse_move(d)});
    }
    for (auto& [key, succs] : atm.delta)
        std::sort(succs.begin(), succs.end());
    atm.validate();
    return atm;
}

namespace {

void render_common(std::ostringstream& out, const std::string& type,
                   const std::string& name,
                   const std::vector<Symbol>& alphabet, const Symbol& blank,
                   const std::vector<State>& states, const State& initial,
                   const std::set<State>& accepting,
                   const std::set<State>& rejecting) {
    auto join = [](const auto& xs) {
        std::string s;
        for (const auto& x : xs) {
            if (!s.empty())
                s += ' ';
            s += x;
        }
        return s;
    };
    out << "type: " << type << "\n";
    if (!name.empty())
        out << "name: " << name << "\n";
    out << "alphabet: " << join(alphabet) << "\n";
    out << "blank: " << blank << "\n";
    out << "states: " << join(states) << "\n";
    out << "initial: " << initial << "\n";
    out << "accept: " << join(accepting) << "\n";
    out << "reject: " << join(rejecting) << "\n";
}

}  // namespace

std::string render_tm(const TuringMachine& tm) {
    std::ostringstream out;
    render_common(out, "tm", tm.name, tm.alphabet, tm.blank, tm.states,
                  tm.initial, tm.accepting, tm.rejecting);
    for (const auto& [key, tr] : tm.delta) {
        if (tm.is_halting(key.first))
            continue;  // implicit self-loops
        out << "delta: " << key.first << ' ' << key.second << " -> "
            << tr.next << ' ' << tr.write << ' ' << move_str(tr.move) << "\n";
    }
    return out.str();
}

std::string render_atm(const AlternatingTM& atm) {
    std::ostringstream out;
    render_common(out, "atm", atm.name, atm.alphabet, atm.blank, atm.states,
                  atm.initial, atm.accepting, atm.rejecting);
    auto join = [](const std::set<State>& xs) {
        std::string s;
        for (const auto& x : xs) {
            if (!s.empty())
                s += ' ';
            s += x;
        }
        return s;
    };
    if (!atm.existential.empty())
        out << "exists: " << join(atm.existential) << "\n";
    if (!atm.universal.empty())
        out << "forall: " << join(atm.universal) << "\n";
    for (const auto& [key, succs] : atm.delta) {
        for (const TmTransition& tr : succs) {
            out << "delta: " << key.first << ' ' << key.second << " -> "
                << tr.next << ' ' << tr.write << ' ' << move_str(tr.move)
                << "\n";
        }
    }
    return out.str();
}

std::vector<Symbol> parse_tape_input(const std::vector<Symbol>& alphabet,
                                     const Symbol& blank,
                                     const std::string& text) {
    std::vector<Symbol> out;
    if (text.find(' ') != std::string::npos) {
        out = split_ws(text);
    } else {
        for (char c : text)
            out.push_back(std::string(1, c));
    }
    for (const Symbol& s : out) {
        if (s == blank)
            throw MachineError("input may not contain the blank symbol");
        if (std::find(alphabet.begin(), alphabet.end(), s) == alphabet.end())
            throw MachineError("input symbol '" + s + "' not in alphabet");
    }
    return out;
}

}  // namespace recur
