#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "recur/runtime.hpp"
#include "recur/turing.hpp"

namespace recur {

// Frames encode calls to five mutually recursive functions over a Turing
// machine: STATE/POS return the control state and head position at time t,
// CELL the symbol of cell p at time t, SYMBOL the symbol under the head, and
// RUN the eventual accept/reject bit from time t on. Layout:
//
//   <FN> <sep> x... <sep> bin(t) [ <sep> sign bin(|p|) ] ([SEP] value...)*
//
// where <sep> separates arguments, [SEP] precedes each cached subcall result
// (return payloads start with [SEP], so completed subcalls advance the
// phase), t is MSB-first binary, and p is sign-magnitude.
enum class RecFn { State, Pos, Cell, Symbol, Run };

const char* to_string(RecFn fn);

struct RecFrame {
    RecFn fn = RecFn::Run;
    std::vector<Symbol> input;
    std::uint64_t t = 0;
    std::int64_t p = 0;  // Cell only
    std::vector<TokenSeq> cached;

    std::size_t phase() const { return cached.size(); }
};

TokenSeq encode_binary(std::uint64_t v);
std::uint64_t parse_binary(const TokenSeq& bits);
TokenSeq encode_signed(std::int64_t v);
std::int64_t parse_signed(const TokenSeq& toks);

// Encodes the call frame (argument part only; no cached results).
TokenSeq encode_rec_frame(const RecFrame& f);
RecFrame parse_rec_frame(const TokenSeq& frame);  // throws GeneratorError

// Frame length is bounded by A*(n + ceil(log2(t+1))) + B over every frame a
// run can create (t at most one past the halting time).
inline constexpr std::size_t kRecFrameLenA = 4;
inline constexpr std::size_t kRecFrameLenB = 16;

// Frames created per function tag (a frame is counted at its phase-0
// invocation, memo hits included).
struct CostLedger {
    std::map<std::string, std::uint64_t> frames;

    void count(RecFn fn) { ++frames[to_string(fn)]; }
    std::uint64_t total() const;
    std::uint64_t of(RecFn fn) const;
};

// The next-block policy. Stateful: owns the memo store and the cost ledger,
// so use one instance per run (wrap with std::ref when handing to run()).
class RecTmGenerator {
public:
    RecTmGenerator(TuringMachine tm, bool memoize);

    TokenSeq operator()(const TokenSeq& view);

    const CostLedger& ledger() const { return ledger_; }
    std::size_t memo_size() const { return memo_.size(); }

private:
    TokenSeq next_block(const RecFrame& f);
    TokenSeq call_block(const RecFrame& child);
    TokenSeq return_block(TokenSeq value, const RecFrame& f);
    std::string memo_key(const RecFrame& f) const;

    TuringMachine tm_;
    bool memoize_;
    std::map<std::string, TokenSeq> memo_;  // key -> return value tokens
    CostLedger ledger_;
};

struct RecRunLimits {
    std::size_t max_steps = 50'000'000;
    std::size_t max_depth = 1'000'000;
    std::size_t max_local_space = std::size_t{1} << 16;
    bool loop_detection = false;
    bool keep_step_log = false;
    StepObserver observer;
};

struct DecideResult {
    Verdict verdict = Verdict::Timeout;
    RunResult run;
    CostLedger ledger;
};

// DECIDE(x) = RUN(x, 0) evaluated through the context-stack runtime.
DecideResult decide(const TuringMachine& tm, const std::vector<Symbol>& input,
                    bool memoize, const RecRunLimits& limits = {});

// Frames created by evaluating fn(x, t[, p]) without memoization.
std::uint64_t measure_cost(const TuringMachine& tm,
                           const std::vector<Symbol>& input, RecFn fn,
                           std::uint64_t t, std::int64_t p = 0,
                           const RecRunLimits& limits = {});

// Upper-bound tables from iterating the invocation recurrences.
struct CostBases {
    std::uint64_t state0 = 1;
    std::uint64_t pos0 = 1;
    std::uint64_t cell0 = 1;
    std::uint64_t symbol0 = 3;
};
struct CostBound {
    unsigned __int128 v = 0;  // max of the STATE/POS bounds
    unsigned __int128 c = 0;  // CELL bound (worst case over p)
};
// Throws std::overflow_error when the table value no longer fits.
CostBound cost_bound(std::uint64_t t, const CostBases& bases = {});
std::string u128_to_string(unsigned __int128 v);

}  // namespace recur
