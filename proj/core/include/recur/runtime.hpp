#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "recur/tokens.hpp"

namespace recur {

enum class OutputKind { Call, Return, Plain };

// Classified generator output. For Call/Return, `prefix` is everything
// before the terminal block and `payload` its content; for Plain, `prefix`
// is the whole sequence and `payload` is empty.
struct GeneratorOutput {
    OutputKind kind = OutputKind::Plain;
    TokenSeq prefix;
    TokenSeq payload;
};

// Suffix-triggered classification. A call block fires when the sequence ends
// with </call> and the nearest structural marker to its left is <call>; the
// payload may contain [SEP] but no structural markers. A return block fires
// when the sequence ends with </return> and the nearest structural marker to
// its left, ignoring <call>, is <return>; a lone <call> inside a return
// payload is the open-call-prefix used for tail-call handoff and is legal.
// Anything else (including mismatched nesting) is Plain.
GeneratorOutput classify_output(const TokenSeq& y);

// A generator maps its input view (the active frame, with the root prompt
// prepended under prompt prefixing) to the newly emitted continuation.
// Generators must be deterministic. A generator that cannot parse its frame
// throws GeneratorError, which the runtime surfaces as MalformedOutput.
using Generator = std::function<TokenSeq(const TokenSeq&)>;

struct GeneratorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-empty stack of frames. Only the last frame is active; each non-root
// frame remembers the call payload that created it (needed for the
// question-preservation return rendering).
class ContextStack {
public:
    explicit ContextStack(TokenSeq root);

    std::size_t depth() const { return frames_.size(); }
    const TokenSeq& active() const { return frames_.back(); }
    const TokenSeq& frame(std::size_t i) const { return frames_[i]; }
    const TokenSeq& question(std::size_t i) const { return questions_[i]; }
    const std::vector<TokenSeq>& frames() const { return frames_; }

    void replace_active(TokenSeq frame);
    void push(TokenSeq frame, TokenSeq question);
    // Pops the active frame; returns the question it was created with.
    TokenSeq pop();

    bool operator==(const ContextStack& other) const {
        return frames_ == other.frames_;
    }

private:
    std::vector<TokenSeq> frames_;
    std::vector<TokenSeq> questions_;
};

// (global space, local space) = (total tokens, longest frame).
std::pair<std::size_t, std::size_t> measure(const ContextStack& stack);

struct StackFingerprint {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    bool operator==(const StackFingerprint&) const = default;
};
struct StackFingerprintHash {
    std::size_t operator()(const StackFingerprint& f) const {
        return static_cast<std::size_t>(f.lo ^ (f.hi * 0x9e3779b97f4a7c15ULL));
    }
};
using LoopHistory = std::unordered_set<StackFingerprint, StackFingerprintHash>;

// 128-bit digest of the full frame list.
StackFingerprint fingerprint(const ContextStack& stack);

// True iff this exact stack state was recorded before; records it otherwise.
bool detect_loop(LoopHistory& history, const ContextStack& stack);

enum class LimitKind { LocalSpace, Depth, Steps };
enum class BottomReason { LoopDetected, LimitExceeded, MalformedOutput };

const char* to_string(LimitKind k);
const char* to_string(BottomReason r);

struct StepRecord {
    std::size_t depth = 0;
    std::size_t local_space = 0;
    std::size_t global_space = 0;
    bool operator==(const StepRecord&) const = default;
};

struct ResourceTrace {
    std::size_t max_local_space = 0;
    std::size_t max_global_space = 0;
    std::size_t max_depth = 0;
    std::size_t total_steps = 0;           // generator invocations
    std::size_t total_tokens_emitted = 0;  // trajectory length
    std::vector<StepRecord> per_step;      // filled when keep_step_log is set

    bool operator==(const ResourceTrace&) const = default;
};

// One-line record: "max_ls=.. max_gs=.. max_depth=.. total_steps=.. total_tokens=.."
std::string render_trace_record(const ResourceTrace& t);
ResourceTrace parse_trace_record(const std::string& line);
// CSV with header "step,depth,ls,gs".
std::string render_step_csv(const ResourceTrace& t);

struct ContextStackView;  // fwd

struct StepEvent {
    std::size_t step = 0;  // 1-based generator invocation index
    const TokenSeq& view;
    const TokenSeq& continuation;
    const GeneratorOutput& output;
    // Stack after the transition; for the terminal depth-1 return this is the
    // pre-transition stack (the run ends instead of transitioning).
    const ContextStack& stack;
    std::size_t local_space = 0;
    std::size_t global_space = 0;
};
using StepObserver = std::function<void(const StepEvent&)>;

struct RunConfig {
    bool prompt_prefixing = false;      // Variant 1
    bool question_preservation = false; // Variant 2
    std::size_t max_local_space = std::size_t{1} << 16;
    std::size_t max_depth = 10'000;
    std::size_t max_steps = 1'000'000;
    bool loop_detection = true;
    bool keep_step_log = false;
    StepObserver observer;  // optional

    void validate() const;  // all limits strictly positive
};

struct RunResult {
    enum class Kind { Answer, Bottom };
    Kind kind = Kind::Bottom;
    TokenSeq answer;                   // when Answer
    BottomReason reason = BottomReason::MalformedOutput;  // when Bottom
    LimitKind limit = LimitKind::Steps;                   // when LimitExceeded
    std::string detail;
    ResourceTrace trace;

    bool is_answer() const { return kind == Kind::Answer; }
    bool operator==(const RunResult& other) const {
        if (kind != other.kind || trace != other.trace)
            return false;
        if (kind == Kind::Answer)
            return answer == other.answer;
        return reason == other.reason &&
               (reason != BottomReason::LimitExceeded || limit == other.limit);
    }
};

// The "q. The answer is: a." rendering appended to the parent on a
// question-preserved return (trailing newline token included).
TokenSeq render_answer_pair(const TokenSeq& question, const TokenSeq& answer);

// Applies one transition. Call pushes the payload as a new frame (the parent
// keeps prefix, or prefix + payload under question preservation); Return pops
// and appends the payload (or the answer-pair rendering) to the parent; Plain
// replaces the active frame. Return at depth 1 is the caller's job.
void apply_transition(ContextStack& stack, const GeneratorOutput& out,
                      const RunConfig& cfg);

// Runs the machine from [prompt] until a return fires at depth 1 (Answer) or
// a Bottom condition triggers.
RunResult run(const TokenSeq& prompt, const Generator& generate,
              const RunConfig& cfg);

}  // namespace recur
