#include "recur/runtime.hpp"

#include <cassert>
#include <cstdio>
#include <utility>

namespace recur {

GeneratorOutput classify_output(const TokenSeq& y) {
    GeneratorOutput out;
    out.kind = OutputKind::Plain;
    if (y.empty()) {
        return out;
    }
    const Token& last = y.back();
    if (last == tok::CallClose) {
        // Innermost block: nearest structural marker to the left must be the
        // matching opener, so call payloads never contain structural markers.
        for (std::size_t i = y.size() - 1; i-- > 0;) {
            if (!is_structural_marker(y[i]))
                continue;
            if (y[i] == tok::CallOpen) {
                out.kind = OutputKind::Call;
                out.prefix = subseq(y, 0, i);
                out.payload = subseq(y, i + 1, y.size() - 1);
                return out;
            }
            break;  // mismatched nesting
        }
    } else if (last == tok::RetClose) {
        // <call> is transparent here: a return payload may carry an open
        // call-prefix (tail-call handoff to the depth-1 dispatcher).
        for (std::size_t i = y.size() - 1; i-- > 0;) {
            if (!is_structural_marker(y[i]) || y[i] == tok::CallOpen)
                continue;
            if (y[i] == tok::RetOpen) {
                out.kind = OutputKind::Return;
                out.prefix = subseq(y, 0, i);
                out.payload = subseq(y, i + 1, y.size() - 1);
                return out;
            }
            break;
        }
    }
    out.prefix = y;
    return out;
}

ContextStack::ContextStack(TokenSeq root) {
    frames_.push_back(std::move(root));
    questions_.emplace_back();
}

void ContextStack::replace_active(TokenSeq frame) {
    frames_.back() = std::move(frame);
}

void ContextStack::push(TokenSeq frame, TokenSeq question) {
    frames_.push_back(std::move(frame));
    questions_.push_back(std::move(question));
}

TokenSeq ContextStack::pop() {
    assert(frames_.size() >= 2);
    TokenSeq q = std::move(questions_.back());
    frames_.pop_back();
    questions_.pop_back();
    return q;
}

std::pair<std::size_t, std::size_t> measure(const ContextStack& stack) {
    std::size_t gs = 0;
    std::size_t ls = 0;
    for (const TokenSeq& f : stack.frames()) {
        gs += f.size();
        ls = std::max(ls, f.size());
    }
    return {gs, ls};
}

namespace {

// FNV-1a over frame bytes. 0xFF/0xFE never occur in UTF-8, so they are safe
// token and frame boundary sentinels.
std::uint64_t digest(const ContextStack& stack, std::uint64_t seed) {
    std::uint64_t h = seed;
    auto mix = [&h](unsigned char c) {
        h ^= c;
        h *= 0x100000001b3ULL;
    };
    for (const TokenSeq& frame : stack.frames()) {
        for (const Token& t : frame) {
            for (char c : t)
                mix(static_cast<unsigned char>(c));
            mix(0xFF);
        }
        mix(0xFE);
    }
    return h;
}

}  // namespace

StackFingerprint fingerprint(const ContextStack& stack) {
    return {digest(stack, 0xcbf29ce484222325ULL),
            digest(stack, 0x84222325cbf29ce4ULL)};
}

bool detect_loop(LoopHistory& history, const ContextStack& stack) {
    return !history.insert(fingerprint(stack)).second;
}

const char* to_string(LimitKind k) {
    switch (k) {
    case LimitKind::LocalSpace: return "local_space";
    case LimitKind::Depth: return "depth";
    case LimitKind::Steps: return "steps";
    }
    return "?";
}

const char* to_string(BottomReason r) {
    switch (r) {
    case BottomReason::LoopDetected: return "loop_detected";
    case BottomReason::LimitExceeded: return "limit_exceeded";
    case BottomReason::MalformedOutput: return "malformed_output";
    }
    return "?";
}

std::string render_trace_record(const ResourceTrace& t) {
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "max_ls=%zu max_gs=%zu max_depth=%zu total_steps=%zu "
                  "total_tokens=%zu",
                  t.max_local_space, t.max_global_space, t.max_depth,
                  t.total_steps, t.total_tokens_emitted);
    return buf;
}

ResourceTrace parse_trace_record(const std::string& line) {
    ResourceTrace t;
    if (std::sscanf(line.c_str(),
                    "max_ls=%zu max_gs=%zu max_depth=%zu total_steps=%zu "
                    "total_tokens=%zu",
                    &t.max_local_space, &t.max_global_space, &t.max_depth,
                    &t.total_steps, &t.total_tokens_emitted) != 5) {
        throw std::invalid_argument("bad trace record: " + line);
    }
    return t;
}

std::string render_step_csv(const ResourceTrace& t) {
    std::string out = "step,depth,ls,gs\n";
    char buf[96];
    for (std::size_t i = 0; i < t.per_step.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%zu,%zu\n", i,
                      t.per_step[i].depth, t.per_step[i].local_space,
                      t.per_step[i].global_space);
        out += buf;
    }
    return out;
}

void RunConfig::validate() const {
    if (max_local_space == 0 || max_depth == 0 || max_steps == 0)
        throw std::invalid_argument("run limits must be strictly positive");
}

TokenSeq render_answer_pair(const TokenSeq& question, const TokenSeq& answer) {
    TokenSeq pair = tokenize(render(question) + ". The answer is: " +
                             render(answer) + ".");
    pair.push_back(tok::Newline);
    return pair;
}

void apply_transition(ContextStack& stack, const GeneratorOutput& out,
                      const RunConfig& cfg) {
    switch (out.kind) {
    case OutputKind::Plain:
        stack.replace_active(out.prefix);
        return;
    case OutputKind::Call: {
        TokenSeq parent = out.prefix;
        if (cfg.question_preservation)
            append(parent, out.payload);
        stack.replace_active(std::move(parent));
        stack.push(out.payload, out.payload);
        return;
    }
    case OutputKind::Return: {
        assert(stack.depth() >= 2 && "depth-1 returns terminate the run");
        TokenSeq q = stack.pop();
        TokenSeq parent = stack.active();
        if (cfg.question_preservation) {
            // The parent kept q at call time; replace that suffix with the
            // rendered question/answer pair.
            if (parent.size() >= q.size() &&
                std::equal(q.begin(), q.end(), parent.end() - q.size())) {
                parent.resize(parent.size() - q.size());
            }
            append(parent, render_answer_pair(q, out.payload));
        } else {
            append(parent, out.payload);
        }
        stack.replace_active(std::move(parent));
        return;
    }
    }
}

namespace {

struct TraceRecorder {
    ResourceTrace& tr;
    const RunConfig& cfg;

    void record(const ContextStack& stack, std::size_t gs, std::size_t ls) {
        tr.max_local_space = std::max(tr.max_local_space, ls);
        tr.max_global_space = std::max(tr.max_global_space, gs);
        tr.max_depth = std::max(tr.max_depth, stack.depth());
        if (cfg.keep_step_log)
            tr.per_step.push_back({stack.depth(), ls, gs});
    }
};

}  // namespace

RunResult run(const TokenSeq& prompt, const Generator& generate,
              const RunConfig& cfg) {
    cfg.validate();
    RunResult res;
    ResourceTrace& tr = res.trace;
    auto bottom = [&](BottomReason reason, LimitKind limit,
                      std::string detail) -> RunResult& {
        res.kind = RunResult::Kind::Bottom;
        res.reason = reason;
        res.limit = limit;
        res.detail = std::move(detail);
        return res;
    };

    if (prompt.size() > cfg.max_local_space) {
        return bottom(BottomReason::LimitExceeded, LimitKind::LocalSpace,
                      "prompt exceeds max_local_space");
    }

    ContextStack stack{prompt};
    TraceRecorder recorder{tr, cfg};
    {
        auto [gs, ls] = measure(stack);
        recorder.record(stack, gs, ls);
    }
    LoopHistory history;
    if (cfg.loop_detection)
        detect_loop(history, stack);

    for (;;) {
        if (tr.total_steps >= cfg.max_steps)
            return bottom(BottomReason::LimitExceeded, LimitKind::Steps, "");

        TokenSeq prefixed_view;
        const TokenSeq* view = &stack.active();
        if (cfg.prompt_prefixing && tr.total_steps >= 1) {
            prefixed_view = concat(prompt, stack.active());
            view = &prefixed_view;
        }

        TokenSeq continuation;
        try {
            continuation = generate(*view);
        } catch (const GeneratorError& e) {
            return bottom(BottomReason::MalformedOutput, LimitKind::Steps,
                          e.what());
        }
        std::size_t step = ++tr.total_steps;
        tr.total_tokens_emitted += continuation.size();

        TokenSeq y = concat(stack.active(), continuation);
        GeneratorOutput out = classify_output(y);

        if (out.kind == OutputKind::Return && stack.depth() == 1) {
            res.kind = RunResult::Kind::Answer;
            res.answer = out.payload;
            if (!out.prefix.empty())
                res.detail = "depth-1 return discarded a non-empty prefix";
            if (cfg.observer) {
                auto [gs, ls] = measure(stack);
                cfg.observer(StepEvent{step, *view, continuation, out, stack,
                                       ls, gs});
            }
            return res;
        }
        if (out.kind == OutputKind::Plain && y.size() > cfg.max_local_space) {
            return bottom(BottomReason::MalformedOutput, LimitKind::Steps,
                          "no call/return block within the local-space budget");
        }

        apply_transition(stack, out, cfg);
        auto [gs, ls] = measure(stack);
        if (ls > cfg.max_local_space)
            return bottom(BottomReason::LimitExceeded, LimitKind::LocalSpace,
                          "");
        if (stack.depth() > cfg.max_depth)
            return bottom(BottomReason::LimitExceeded, LimitKind::Depth, "");
        recorder.record(stack, gs, ls);
        if (cfg.observer)
            cfg.observer(
                StepEvent{step, *view, continuation, out, stack, ls, gs});
        if (cfg.loop_detection && detect_loop(history, stack))
            return bottom(BottomReason::LoopDetected, LimitKind::Steps, "");
    }
}

}  // namespace recur
