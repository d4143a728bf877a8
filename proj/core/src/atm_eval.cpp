#include "recur/atm_eval.hpp"

#include <algorithm>
#include <cassert>

namespace recur {

Token render_update(const UpdateToken& u) {
    std::string d = u.move < 0 ? "-1" : (u.move > 0 ? "+1" : "0");
    return "(" + u.state + "," + u.write + "," + d + ")";
}

UpdateToken parse_update(const Token& t) {
    if (t.size() < 6 || t.front() != '(' || t.back() != ')')
        throw GeneratorError("bad update token '" + t + "'");
    std::string body = t.substr(1, t.size() - 2);
    std::size_t c1 = body.find(',');
    std::size_t c2 = body.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos ||
        body.find(',', c2 + 1) != std::string::npos)
        throw GeneratorError("bad update token '" + t + "'");
    UpdateToken u;
    u.state = body.substr(0, c1);
    u.write = body.substr(c1 + 1, c2 - c1 - 1);
    std::string d = body.substr(c2 + 1);
    if (d == "-1")
        u.move = -1;
    else if (d == "0")
        u.move = 0;
    else if (d == "+1")
        u.move = 1;
    else
        throw GeneratorError("bad update move '" + d + "'");
    if (u.state.empty() || u.write.empty())
        throw GeneratorError("bad update token '" + t + "'");
    return u;
}

void validate_embeddable(const std::vector<State>& states,
                         const std::vector<Symbol>& alphabet) {
    auto check = [](const std::string& s, const char* what) {
        if (s.find_first_of("(),") != std::string::npos ||
            is_reserved_marker(s) || s == "<sep>")
            throw MachineError(std::string(what) + " '" + s +
                               "' cannot appear inside update tokens");
    };
    for (const State& q : states)
        check(q, "state");
    for (const Symbol& a : alphabet)
        check(a, "symbol");
}

Configuration blank_configuration(const State& q0) {
    Configuration c;
    c.state = q0;
    c.head = 0;
    return c;
}

Configuration apply_update(Configuration c, const UpdateToken& u,
                           const Symbol& blank) {
    c.state = u.state;
    c.write(c.head, u.write, blank);
    c.head += u.move;
    return c;
}

Configuration fold_updates(Configuration c, const TokenSeq& tokens,
                           const Symbol& blank) {
    for (const Token& t : tokens) {
        if (t == tok::Sep || t == "<sep>")
            continue;
        c = apply_update(std::move(c), parse_update(t), blank);
    }
    return c;
}

TokenSeq embed_config(const Configuration& c, const Symbol& blank) {
    std::int64_t lo = std::min<std::int64_t>(0, c.head);
    std::int64_t hi = std::max<std::int64_t>(0, c.head);
    if (!c.tape.empty()) {
        lo = std::min(lo, c.tape.begin()->first);
        hi = std::max(hi, c.tape.rbegin()->first);
    }
    auto sym = [&](std::int64_t i) -> Symbol {
        auto it = c.tape.find(i);
        return it == c.tape.end() ? blank : it->second;
    };
    TokenSeq out;
    for (std::int64_t i = lo; i < hi; ++i)
        out.push_back(render_update({c.state, sym(i), +1}));
    if (c.head == hi) {
        out.push_back(render_update({c.state, sym(hi), 0}));
    } else {
        out.push_back(render_update({c.state, sym(hi), -1}));
        for (std::int64_t j = hi - 1; j > c.head; --j)
            out.push_back(render_update({c.state, sym(j), -1}));
    }
    return out;
}

TokenSeq canon_updates(const TokenSeq& z, const State& q0,
                       const Symbol& blank) {
    return embed_config(fold_updates(blank_configuration(q0), z, blank),
                        blank);
}

bool translationally_equivalent(const Configuration& a,
                                const Configuration& b) {
    if (a.state != b.state)
        return false;
    if (a.tape.empty() != b.tape.empty())
        return false;
    if (a.tape.empty())
        return true;  // all-blank tapes: shift by head offset
    std::int64_t k = a.tape.begin()->first - b.tape.begin()->first;
    if (a.head != b.head + k || a.tape.size() != b.tape.size())
        return false;
    auto ia = a.tape.begin();
    auto ib = b.tape.begin();
    for (; ia != a.tape.end(); ++ia, ++ib) {
        if (ia->first != ib->first + k || ia->second != ib->second)
            return false;
    }
    return true;
}

AtmEvalGenerator::AtmEvalGenerator(AlternatingTM normalized)
    : atm_(std::move(normalized)) {
    atm_.validate();
    validate_embeddable(atm_.states, atm_.alphabet);
}

TokenSeq AtmEvalGenerator::operator()(const TokenSeq& view) const {
    // Frame: embed tokens, then [SEP] b per completed successor call.
    std::size_t first_sep = view.size();
    for (std::size_t i = 0; i < view.size(); ++i) {
        if (view[i] == tok::Sep) {
            first_sep = i;
            break;
        }
    }
    TokenSeq embedded = subseq(view, 0, first_sep);
    if (embedded.empty())
        throw GeneratorError("frame lacks a configuration embedding");
    std::vector<int> bits;
    for (std::size_t i = first_sep; i < view.size(); ++i) {
        if (view[i] == tok::Sep)
            continue;
        if (view[i] == "0")
            bits.push_back(0);
        else if (view[i] == "1")
            bits.push_back(1);
        else
            throw GeneratorError("bad result bit '" + view[i] + "'");
    }
    if (bits.size() > 2)
        throw GeneratorError("frame has more than two result bits");

    Configuration c =
        fold_updates(blank_configuration(atm_.initial), embedded, atm_.blank);

    auto ret = [&](int bit) {
        return TokenSeq{tok::RetOpen, tok::Sep, bit ? "1" : "0",
                        tok::RetClose};
    };
    if (atm_.accepting.count(c.state))
        return ret(1);
    if (atm_.rejecting.count(c.state))
        return ret(0);

    if (bits.size() == 2) {
        int v = atm_.is_existential(c.state) ? (bits[0] | bits[1])
                                             : (bits[0] & bits[1]);
        return ret(v);
    }

    auto it = atm_.delta.find({c.state, c.read(atm_.blank)});
    if (it == atm_.delta.end() || it->second.size() != 2)
        throw GeneratorError("machine is not normalized to binary fanout");
    const TmTransition& tr = it->second[bits.size()];
    TokenSeq walk = embedded;
    walk.push_back(render_update({tr.next, tr.write, tr.move}));
    TokenSeq child = canon_updates(walk, atm_.initial, atm_.blank);
    TokenSeq out{tok::CallOpen};
    append(out, child);
    out.push_back(tok::CallClose);
    return out;
}

RunConfig default_atm_run_config() {
    RunConfig cfg;
    cfg.max_steps = 50'000'000;
    cfg.max_depth = 1'000'000;
    cfg.max_local_space = std::size_t{1} << 16;
    cfg.loop_detection = false;
    return cfg;
}

AtmEvalResult eval_atm(const AlternatingTM& atm,
                       const std::vector<Symbol>& input, RunConfig cfg) {
    cfg.prompt_prefixing = false;
    cfg.question_preservation = false;
    AlternatingTM machine = normalize_atm(atm);
    AtmEvalGenerator gen(std::move(machine));
    Configuration start = initial_configuration(gen.machine().initial, input);
    TokenSeq prompt = embed_config(start, gen.machine().blank);
    AtmEvalResult res;
    res.run = run(prompt, std::cref(gen), cfg);
    if (res.run.is_answer()) {
        const TokenSeq& a = res.run.answer;
        if (a.size() == 2 && a[0] == tok::Sep && (a[1] == "0" || a[1] == "1"))
            res.value = a[1] == "1" ? 1 : 0;
    }
    return res;
}

}  // namespace recur
