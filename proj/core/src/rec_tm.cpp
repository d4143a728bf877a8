#include "recur/rec_tm.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace recur {

namespace {

const Token kArgSep = "<sep>";

RecFn fn_from_token(const Token& t) {
    if (t == "STATE")
        return RecFn::State;
    if (t == "POS")
        return RecFn::Pos;
    if (t == "CELL")
        return RecFn::Cell;
    if (t == "SYMBOL")
        return RecFn::Symbol;
    if (t == "RUN")
        return RecFn::Run;
    throw GeneratorError("unknown function token '" + t + "'");
}

}  // namespace

const char* to_string(RecFn fn) {
    switch (fn) {
    case RecFn::State: return "STATE";
    case RecFn::Pos: return "POS";
    case RecFn::Cell: return "CELL";
    case RecFn::Symbol: return "SYMBOL";
    case RecFn::Run: return "RUN";
    }
    return "?";
}

TokenSeq encode_binary(std::uint64_t v) {
    if (v == 0)
        return {"0"};
    TokenSeq bits;
    while (v) {
        bits.push_back((v & 1) ? "1" : "0");
        v >>= 1;
    }
    std::reverse(bits.begin(), bits.end());
    return bits;
}

std::uint64_t parse_binary(const TokenSeq& bits) {
    if (bits.empty())
        throw GeneratorError("empty binary literal");
    std::uint64_t v = 0;
    for (const Token& b : bits) {
        if (b != "0" && b != "1")
            throw GeneratorError("bad binary digit '" + b + "'");
        if (v >> 63)
            throw GeneratorError("binary literal overflow");
        v = (v << 1) | (b == "1" ? 1u : 0u);
    }
    return v;
}

TokenSeq encode_signed(std::int64_t v) {
    TokenSeq out{v < 0 ? "-" : "+"};
    std::uint64_t mag = v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1
                              : static_cast<std::uint64_t>(v);
    append(out, encode_binary(mag));
    return out;
}

std::int64_t parse_signed(const TokenSeq& toks) {
    if (toks.size() < 2 || (toks[0] != "+" && toks[0] != "-"))
        throw GeneratorError("bad signed literal");
    std::uint64_t mag = parse_binary(subseq(toks, 1, toks.size()));
    if (mag > static_cast<std::uint64_t>(
                  std::numeric_limits<std::int64_t>::max()))
        throw GeneratorError("signed literal overflow");
    auto m = static_cast<std::int64_t>(mag);
    return toks[0] == "-" ? -m : m;
}

TokenSeq encode_rec_frame(const RecFrame& f) {
    TokenSeq out{to_string(f.fn), kArgSep};
    append(out, f.input);
    out.push_back(kArgSep);
    append(out, encode_binary(f.t));
    if (f.fn == RecFn::Cell) {
        out.push_back(kArgSep);
        append(out, encode_signed(f.p));
    }
    return out;
}

RecFrame parse_rec_frame(const TokenSeq& frame) {
    if (frame.empty())
        throw GeneratorError("empty frame");
    RecFrame f;
    f.fn = fn_from_token(frame[0]);

    std::vector<std::size_t> arg_seps;
    std::size_t first_cache = frame.size();
    for (std::size_t i = 1; i < frame.size(); ++i) {
        if (frame[i] == tok::Sep) {
            first_cache = i;
            break;
        }
        if (frame[i] == kArgSep)
            arg_seps.push_back(i);
    }
    std::size_t want = f.fn == RecFn::Cell ? 3 : 2;
    if (arg_seps.size() != want)
        throw GeneratorError("frame has wrong argument count");
    f.input = subseq(frame, arg_seps[0] + 1, arg_seps[1]);
    std::size_t t_end = want == 3 ? arg_seps[2] : first_cache;
    f.t = parse_binary(subseq(frame, arg_seps[1] + 1, t_end));
    if (f.fn == RecFn::Cell)
        f.p = parse_signed(subseq(frame, arg_seps[2] + 1, first_cache));

    std::size_t i = first_cache;
    while (i < frame.size()) {
        assert(frame[i] == tok::Sep);
        std::size_t j = i + 1;
        while (j < frame.size() && frame[j] != tok::Sep)
            ++j;
        f.cached.push_back(subseq(frame, i + 1, j));
        i = j;
    }
    return f;
}

std::uint64_t CostLedger::total() const {
    std::uint64_t sum = 0;
    for (const auto& [fn, count] : frames)
        sum += count;
    return sum;
}

std::uint64_t CostLedger::of(RecFn fn) const {
    auto it = frames.find(to_string(fn));
    return it == frames.end() ? 0 : it->second;
}

RecTmGenerator::RecTmGenerator(TuringMachine tm, bool memoize)
    : tm_(std::move(tm)), memoize_(memoize) {
    tm_.validate();
}

std::string RecTmGenerator::memo_key(const RecFrame& f) const {
    std::string key = to_string(f.fn);
    key += ':';
    key += std::to_string(f.t);
    if (f.fn == RecFn::Cell) {
        key += ':';
        key += std::to_string(f.p);
    }
    return key;
}

TokenSeq RecTmGenerator::call_block(const RecFrame& child) {
    TokenSeq out{tok::CallOpen};
    append(out, encode_rec_frame(child));
    out.push_back(tok::CallClose);
    return out;
}

TokenSeq RecTmGenerator::return_block(TokenSeq value, const RecFrame& f) {
    if (memoize_)
        memo_.emplace(memo_key(f), value);
    TokenSeq out{tok::RetOpen, tok::Sep};
    append(out, value);
    out.push_back(tok::RetClose);
    return out;
}

TokenSeq RecTmGenerator::operator()(const TokenSeq& view) {
    RecFrame f = parse_rec_frame(view);
    for (const Symbol& s : f.input) {
        if (std::find(tm_.alphabet.begin(), tm_.alphabet.end(), s) ==
            tm_.alphabet.end())
            throw GeneratorError("frame input symbol '" + s +
                                 "' not in machine alphabet");
    }
    if (f.phase() == 0) {
        ledger_.count(f.fn);
        if (memoize_) {
            auto it = memo_.find(memo_key(f));
            if (it != memo_.end()) {
                TokenSeq out{tok::RetOpen, tok::Sep};
                append(out, it->second);
                out.push_back(tok::RetClose);
                return out;
            }
        }
    }
    return next_block(f);
}

TokenSeq RecTmGenerator::next_block(const RecFrame& f) {
    auto child = [&](RecFn fn, std::uint64_t t) {
        RecFrame c;
        c.fn = fn;
        c.input = f.input;
        c.t = t;
        return c;
    };
    auto value_state = [&](std::size_t i) -> const State& {
        if (f.cached[i].size() != 1)
            throw GeneratorError("cached state value malformed");
        return f.cached[i][0];
    };

    switch (f.fn) {
    case RecFn::State:
        if (f.t == 0)
            return return_block({tm_.initial}, f);
        switch (f.phase()) {
        case 0: return call_block(child(RecFn::State, f.t - 1));
        case 1: return call_block(child(RecFn::Symbol, f.t - 1));
        case 2: {
            const TmTransition& tr =
                tm_.transition(value_state(0), value_state(1));
            return return_block({tr.next}, f);
        }
        default: throw GeneratorError("STATE frame in impossible phase");
        }
    case RecFn::Pos:
        if (f.t == 0)
            return return_block(encode_signed(0), f);
        switch (f.phase()) {
        case 0: return call_block(child(RecFn::State, f.t - 1));
        case 1: return call_block(child(RecFn::Symbol, f.t - 1));
        case 2: return call_block(child(RecFn::Pos, f.t - 1));
        case 3: {
            const TmTransition& tr =
                tm_.transition(value_state(0), value_state(1));
            std::int64_t prev = parse_signed(f.cached[2]);
            return return_block(encode_signed(prev + tr.move), f);
        }
        default: throw GeneratorError("POS frame in impossible phase");
        }
    case RecFn::Cell:
        if (f.t == 0) {
            Symbol v = tm_.blank;
            if (f.p >= 0 &&
                f.p < static_cast<std::int64_t>(f.input.size()))
                v = f.input[static_cast<std::size_t>(f.p)];
            return return_block({v}, f);
        }
        switch (f.phase()) {
        case 0: return call_block(child(RecFn::Pos, f.t - 1));
        case 1: {
            std::int64_t p_prev = parse_signed(f.cached[0]);
            if (f.p != p_prev) {
                RecFrame c = child(RecFn::Cell, f.t - 1);
                c.p = f.p;
                return call_block(c);
            }
            return call_block(child(RecFn::State, f.t - 1));
        }
        case 2: {
            std::int64_t p_prev = parse_signed(f.cached[0]);
            if (f.p != p_prev)
                return return_block(f.cached[1], f);
            return call_block(child(RecFn::Symbol, f.t - 1));
        }
        case 3: {
            const TmTransition& tr =
                tm_.transition(value_state(1), value_state(2));
            return return_block({tr.write}, f);
        }
        default: throw GeneratorError("CELL frame in impossible phase");
        }
    case RecFn::Symbol:
        switch (f.phase()) {
        case 0: return call_block(child(RecFn::Pos, f.t));
        case 1: {
            RecFrame c = child(RecFn::Cell, f.t);
            c.p = parse_signed(f.cached[0]);
            return call_block(c);
        }
        case 2: return return_block(f.cached[1], f);
        default: throw GeneratorError("SYMBOL frame in impossible phase");
        }
    case RecFn::Run:
        switch (f.phase()) {
        case 0: return call_block(child(RecFn::State, f.t));
        case 1: {
            const State& q = value_state(0);
            if (tm_.accepting.count(q))
                return return_block({"1"}, f);
            if (tm_.rejecting.count(q))
                return return_block({"0"}, f);
            return call_block(child(RecFn::Run, f.t + 1));
        }
        case 2: return return_block(f.cached[1], f);
        default: throw GeneratorError("RUN frame in impossible phase");
        }
    }
    throw GeneratorError("unreachable");
}

namespace {

RunConfig limits_to_config(const RecRunLimits& limits) {
    RunConfig cfg;
    cfg.max_steps = limits.max_steps;
    cfg.max_depth = limits.max_depth;
    cfg.max_local_space = limits.max_local_space;
    cfg.loop_detection = limits.loop_detection;
    cfg.keep_step_log = limits.keep_step_log;
    cfg.observer = limits.observer;
    return cfg;
}

}  // namespace

DecideResult decide(const TuringMachine& tm, const std::vector<Symbol>& input,
                    bool memoize, const RecRunLimits& limits) {
    RecTmGenerator gen(tm, memoize);
    RecFrame root;
    root.fn = RecFn::Run;
    root.input = input;
    root.t = 0;
    DecideResult res;
    res.run = run(encode_rec_frame(root), std::ref(gen),
                  limits_to_config(limits));
    res.ledger = gen.ledger();
    if (res.run.is_answer()) {
        const TokenSeq& a = res.run.answer;
        if (a.size() == 2 && a[0] == tok::Sep)
            res.verdict = a[1] == "1" ? Verdict::Accept : Verdict::Reject;
    }
    return res;
}

std::uint64_t measure_cost(const TuringMachine& tm,
                           const std::vector<Symbol>& input, RecFn fn,
                           std::uint64_t t, std::int64_t p,
                           const RecRunLimits& limits) {
    RecTmGenerator gen(tm, /*memoize=*/false);
    RecFrame root;
    root.fn = fn;
    root.input = input;
    root.t = t;
    root.p = p;
    RunResult r =
        run(encode_rec_frame(root), std::ref(gen), limits_to_config(limits));
    if (!r.is_answer())
        throw GeneratorError("cost measurement did not complete: " +
                             std::string(to_string(r.reason)));
    return gen.ledger().total();
}

CostBound cost_bound(std::uint64_t t, const CostBases& bases) {
    using U = unsigned __int128;
    constexpr U kMax = ~static_cast<U>(0);
    auto add = [&](U a, U b) {
        if (kMax - a < b)
            throw std::overflow_error("cost_bound overflow");
        return a + b;
    };
    U s = bases.state0;
    U p = bases.pos0;
    U c = bases.cell0;
    U y = bases.symbol0;
    for (std::uint64_t i = 1; i <= t; ++i) {
        U s2 = add(add(s, y), 1);
        U p2 = add(add(p, add(s, y)), 1);
        U c2 = add(add(p, std::max(c, add(s, y))), 1);
        U y2 = add(add(p2, c2), 1);
        s = s2;
        p = p2;
        c = c2;
        y = y2;
    }
    return {std::max(s, p), c};
}

std::string u128_to_string(unsigned __int128 v) {
    if (v == 0)
        return "0";
    std::string out;
    while (v) {
        out += static_cast<char>('0' + static_cast<int>(v % 10));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace recur
