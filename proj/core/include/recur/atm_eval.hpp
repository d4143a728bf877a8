#pragma once

#include <cstdint>

#include "recur/runtime.hpp"
#include "recur/turing.hpp"

namespace recur {

// (next state, written symbol, head move): the alphabet that embeds
// configurations as walks. Rendered as a single "(q,w,d)" token.
struct UpdateToken {
    State state;
    Symbol write;
    int move = 0;

    bool operator==(const UpdateToken&) const = default;
};

Token render_update(const UpdateToken& u);
UpdateToken parse_update(const Token& t);  // throws GeneratorError

// States and symbols embed into update tokens, so they may not contain
// '(' ')' ',' or collide with reserved markers. Throws MachineError.
void validate_embeddable(const std::vector<State>& states,
                         const std::vector<Symbol>& alphabet);

Configuration blank_configuration(const State& q0);

// Update(c, (q,w,d)): write w at the head, move by d, set state q.
Configuration apply_update(Configuration c, const UpdateToken& u,
                           const Symbol& blank);

// Left fold of apply_update over a token sequence; "<sep>" and [SEP] tokens
// are separators and are skipped.
Configuration fold_updates(Configuration c, const TokenSeq& tokens,
                           const Symbol& blank);

// Canonical walk encoding a configuration: sweep the covered interval
// left-to-right, then walk back to the head position. All tokens carry the
// configuration's state; fold_updates from a blank configuration recovers
// the configuration up to translation.
TokenSeq embed_config(const Configuration& c, const Symbol& blank);

// Canon(z) = Embed(Update(c_blank, z)).
TokenSeq canon_updates(const TokenSeq& z, const State& q0,
                       const Symbol& blank);

// Equality up to a uniform shift of tape coordinates.
bool translationally_equivalent(const Configuration& a,
                                const Configuration& b);

// The three-phase evaluation policy: a frame is a canonical embedding
// optionally followed by [SEP] b0 [ [SEP] b1 ]. Halting configurations
// return their verdict bit; otherwise the two successors are called in
// canonical order and their bits combined (OR for existential states, AND
// for universal ones). Works on normalized machines (exactly two successor
// tuples per reachable non-halting (state, symbol)).
class AtmEvalGenerator {
public:
    explicit AtmEvalGenerator(AlternatingTM normalized);

    TokenSeq operator()(const TokenSeq& view) const;

    const AlternatingTM& machine() const { return atm_; }

private:
    AlternatingTM atm_;
};

struct AtmEvalResult {
    int value = -1;  // 0/1 when the run answered
    RunResult run;
};

RunConfig default_atm_run_config();

// Evaluates the machine on an input through the context-stack runtime,
// starting from the embedded initial configuration. The machine is
// normalized internally if needed.
AtmEvalResult eval_atm(const AlternatingTM& atm,
                       const std::vector<Symbol>& input,
                       RunConfig cfg = default_atm_run_config());

}  // namespace recur
