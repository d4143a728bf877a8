#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "recur/runtime.hpp"

namespace recur {

struct ScaffoldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Generator oracles are total functions on token sequences.
using SeqFn = std::function<TokenSeq(const TokenSeq&)>;

struct NamedGenerator {
    std::string name;
    SeqFn fn;
};

class EvalSession;

// Oracle surface handed to a scaffold program. Queries are metered: the
// space proxy of an invocation is its input length plus the last metered
// program-state size plus the current query and answer lengths.
class ScaffoldCtx {
public:
    TokenSeq gen(std::size_t index, const TokenSeq& query);
    // Recursion oracle. Undefined results unwind the calling program.
    TokenSeq self(std::size_t index, const TokenSeq& query);
    // Report the current size of the program's live state.
    void meter(std::size_t state_tokens);
    const TokenSeq& input() const { return input_; }

private:
    friend class EvalSession;
    ScaffoldCtx(EvalSession& session, TokenSeq input, std::size_t depth)
        : session_(session), input_(std::move(input)), depth_(depth) {}

    void charge(std::size_t amount);

    EvalSession& session_;
    TokenSeq input_;
    std::size_t depth_;
    std::size_t state_ = 0;
    std::size_t used_ = 0;
};

using ScaffoldProgram = std::function<TokenSeq(ScaffoldCtx&, const TokenSeq&)>;

struct Scaffold {
    std::string name;
    ScaffoldProgram program;
};

struct ScaffoldSystem {
    std::string name;
    std::vector<NamedGenerator> generators;
    std::vector<Scaffold> scaffolds;

    std::size_t generator_index(const std::string& name) const;
    std::size_t scaffold_index(const std::string& name) const;
};

struct EvalBudget {
    std::size_t max_space = std::size_t{1} << 16;  // L, per invocation
    std::size_t max_calls = 100'000;  // scaffold invocations + oracle queries
    std::size_t max_depth = 1'000;    // recursion-oracle nesting

    void validate() const;
};

enum class EvalBottom { Cycle, BudgetExceeded, SpaceExceeded };
const char* to_string(EvalBottom b);

struct EvalOutcome {
    bool defined = false;
    TokenSeq output;
    EvalBottom bottom = EvalBottom::Cycle;
    std::size_t max_space = 0;  // largest per-invocation space observed
    std::uint64_t calls = 0;
    std::size_t max_depth = 0;
};

// Memoized least-fixpoint evaluation with cycle detection: a query that
// re-enters an in-progress (scaffold, input) pair is undefined, and
// undefined answers propagate to the querying program. The memo table
// persists across evaluate() calls on the same session (budget counters
// reset), so warm re-evaluation reproduces the fixpoint.
class EvalSession {
public:
    EvalSession(const ScaffoldSystem& sys, EvalBudget budget);

    EvalOutcome evaluate(std::size_t scaffold_index, const TokenSeq& input);

    std::size_t memo_entries() const { return memo_.size(); }
    std::uint64_t total_invocations() const { return invocations_; }

private:
    friend class ScaffoldCtx;

    struct MemoValue {
        bool defined = false;
        TokenSeq output;
        EvalBottom bottom = EvalBottom::Cycle;
    };

    TokenSeq eval_scaffold(std::size_t index, const TokenSeq& input,
                           std::size_t depth);
    TokenSeq query_generator(std::size_t index, const TokenSeq& query);
    void count_call();

    const ScaffoldSystem& sys_;
    EvalBudget budget_;
    std::map<std::string, MemoValue> memo_;
    std::map<std::string, bool> in_progress_;
    std::uint64_t invocations_ = 0;  // within the current evaluate()
    std::size_t max_depth_seen_ = 0;
    std::size_t max_space_seen_ = 0;
};

EvalOutcome evaluate(const ScaffoldSystem& sys, std::size_t scaffold_index,
                     const TokenSeq& input, const EvalBudget& budget);

// ---- built-in loop programs ----

inline const Token kStopToken = "STOP";
inline const Token kMaskToken = "<mask>";

// Generate until the stop token appears, summarizing whenever the sequence
// reaches max_len. Throws ScaffoldError when max_iters runs out.
TokenSeq run_summarization_loop(
    TokenSeq x, const SeqFn& generate, const SeqFn& summarize,
    std::size_t max_len, std::size_t max_iters,
    const std::function<void(const TokenSeq&)>& on_step = {});

// Iterated denoise/overwrite over a fixed-length masked sequence until no
// mask tokens remain.
TokenSeq run_diffusion_loop(
    TokenSeq x, const SeqFn& denoise,
    const std::function<TokenSeq(const TokenSeq&, const TokenSeq&)>&
        transition,
    std::size_t max_iters,
    const std::function<void(const TokenSeq&)>& on_step = {});

// Fill masked positions with the most frequent unmasked token (ties go to
// the lexicographically smallest; an all-masked sequence fills with "0").
TokenSeq majority_denoise(const TokenSeq& x);

// Overwrite masked positions of x with the prediction y.
TokenSeq overwrite_masks(const TokenSeq& x, const TokenSeq& y);

// ---- prover / verifier ----

// f_p answers "goal | seed" with a proof; f_v answers "goal | proof" with
// correct, wrong, or incomplete followed by subgoal tokens. The prover tries
// the seeds in order and returns correct on the first verified proof; the
// verifier proves subgoals recursively and returns their conjunction.
EvalOutcome run_prover_verifier(const TokenSeq& goal,
                                const std::vector<Token>& seeds,
                                const SeqFn& prover_gen,
                                const SeqFn& verifier_gen,
                                const EvalBudget& budget);

// Lookup-table stub generator; the key is the rendered query. Unknown
// queries throw ScaffoldError.
SeqFn table_generator(std::map<std::string, std::string> table);

// ---- system descriptor files ----
//
//   system NAME
//   generator NAME table
//     goal | s1 -> proofA
//   end
//   generator NAME builtin KIND [k=v ...]
//   scaffold NAME KIND [k=v ...]
//
// Scaffold kinds: identity, self_loop, const, rcm, summarize_loop,
// diffusion_loop, prover, verifier. Scaffolds may reference scaffolds
// declared later (mutual recursion).
ScaffoldSystem parse_scaffold_system(const std::string& text);

// Programs and stub generators addressable from descriptor files.
ScaffoldProgram make_builtin_scaffold(
    const std::string& kind, const std::map<std::string, std::string>& args,
    const ScaffoldSystem& sys, std::size_t self_index);
SeqFn make_builtin_generator(const std::string& kind,
                             const std::map<std::string, std::string>& args);

}  // namespace recur
