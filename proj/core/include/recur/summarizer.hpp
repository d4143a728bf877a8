#pragma once

#include <cstdint>

#include "recur/atm_eval.hpp"
#include "recur/runtime.hpp"
#include "recur/turing.hpp"

namespace recur {

// Depth-2 simulation of a deterministic machine with periodic
// summarization. Depth-2 frames hold Frame(z, u) = z <sep> u, where z is the
// embedded summary of all past computation and u the update-token trace
// since the last summarization; the represented configuration is the fold of
// z then u from the blank configuration. The depth-1 frame is a dispatcher:
// it closes open call-prefixes handed back by depth-2 summarization returns
// and forwards the final verdict bit.

// Conf(z, u): fold from the blank configuration; separators are ignored.
Configuration conf_of(const TokenSeq& z, const TokenSeq& u, const State& q0,
                      const Symbol& blank);

TokenSeq make_frame2(const TokenSeq& summary, const TokenSeq& trace);

// One policy serves both depths: frames holding an open <call> or a bare bit
// are dispatcher frames, everything else parses as Frame(z, u).
class SummarizerGenerator {
public:
    // `threshold` is the new-trace length that triggers summarization
    // (2N in the default configuration).
    SummarizerGenerator(TuringMachine tm, std::size_t threshold);

    TokenSeq operator()(const TokenSeq& view);

    std::uint64_t summarizations() const { return summarizations_; }

private:
    TuringMachine tm_;
    std::size_t threshold_;
    std::uint64_t summarizations_ = 0;
};

// Maximum embedding length over the configurations of a direct run; the N of
// the construction. Throws MachineError if the machine does not halt within
// max_tm_steps.
std::size_t compute_embed_cap(const TuringMachine& tm,
                              const std::vector<Symbol>& input,
                              std::uint64_t max_tm_steps);

struct SummarizeOptions {
    std::uint64_t max_tm_steps = 1u << 22;
    std::size_t threshold_factor = 2;  // summarize when |u| = factor * N
    std::size_t n_override = 0;        // 0: compute from the direct pass
    bool keep_step_log = false;
    bool loop_detection = true;
    StepObserver observer;
};

struct SummarizeResult {
    Verdict verdict = Verdict::Timeout;
    RunResult run;
    std::size_t n_cap = 0;           // N
    std::uint64_t tm_steps = 0;      // direct halting time T
    std::uint64_t summarizations = 0;
};

SummarizeResult simulate_summarized(const TuringMachine& tm,
                                    const std::vector<Symbol>& input,
                                    const SummarizeOptions& opts = {});

}  // namespace recur
