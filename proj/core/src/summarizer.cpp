#include "recur/summarizer.hpp"

#include <algorithm>

namespace recur {

namespace {
const Token kFrameSep = "<sep>";
}

Configuration conf_of(const TokenSeq& z, const TokenSeq& u, const State& q0,
                      const Symbol& blank) {
    Configuration c = fold_updates(blank_configuration(q0), z, blank);
    return fold_updates(std::move(c), u, blank);
}

TokenSeq make_frame2(const TokenSeq& summary, const TokenSeq& trace) {
    TokenSeq f = summary;
    f.push_back(kFrameSep);
    append(f, trace);
    return f;
}

SummarizerGenerator::SummarizerGenerator(TuringMachine tm,
                                         std::size_t threshold)
    : tm_(std::move(tm)), threshold_(threshold) {
    tm_.validate();
    validate_embeddable(tm_.states, tm_.alphabet);
    if (threshold_ == 0)
        throw MachineError("summarization threshold must be positive");
}

TokenSeq SummarizerGenerator::operator()(const TokenSeq& view) {
    // Dispatcher: complete an open call-prefix.
    if (std::find(view.begin(), view.end(), tok::CallOpen) != view.end())
        return {tok::CallClose};
    // Dispatcher: a bare bit is the final verdict.
    if (view.size() == 1 && (view[0] == "0" || view[0] == "1"))
        return {tok::RetOpen, view[0], tok::RetClose};

    auto sep = std::find(view.begin(), view.end(), kFrameSep);
    if (sep == view.end())
        throw GeneratorError("frame is neither a dispatcher state nor a "
                             "summary/trace pair");
    TokenSeq z(view.begin(), sep);
    TokenSeq u(sep + 1, view.end());
    Configuration c = conf_of(z, u, tm_.initial, tm_.blank);

    if (tm_.accepting.count(c.state))
        return {tok::RetOpen, "1", tok::RetClose};
    if (tm_.rejecting.count(c.state))
        return {tok::RetOpen, "0", tok::RetClose};

    if (u.size() < threshold_) {
        const TmTransition& tr = tm_.transition(c.state, c.read(tm_.blank));
        return {render_update({tr.next, tr.write, tr.move})};
    }
    if (u.size() == threshold_) {
        ++summarizations_;
        TokenSeq out{tok::RetOpen, tok::CallOpen};
        append(out, embed_config(c, tm_.blank));
        out.push_back(kFrameSep);
        out.push_back(tok::RetClose);
        return out;
    }
    throw GeneratorError("new trace exceeded the summarization threshold");
}

std::size_t compute_embed_cap(const TuringMachine& tm,
                              const std::vector<Symbol>& input,
                              std::uint64_t max_tm_steps) {
    std::size_t cap = 0;
    TmRunResult r =
        run_tm(tm, input, max_tm_steps, [&](const Configuration& c) {
            cap = std::max(cap, embed_config(c, tm.blank).size());
        });
    if (r.verdict == Verdict::Timeout)
        throw MachineError("machine did not halt within the direct-pass "
                           "step budget");
    return cap;
}

SummarizeResult simulate_summarized(const TuringMachine& tm,
                                    const std::vector<Symbol>& input,
                                    const SummarizeOptions& opts) {
    SummarizeResult res;
    TmRunResult direct = run_tm(tm, input, opts.max_tm_steps);
    if (direct.verdict == Verdict::Timeout)
        throw MachineError("machine did not halt within the direct-pass "
                           "step budget");
    res.tm_steps = direct.time;

    std::size_t computed = compute_embed_cap(tm, input, opts.max_tm_steps);
    std::size_t n_cap = opts.n_override ? opts.n_override : computed;
    if (n_cap < computed)
        throw MachineError("supplied N is below the maximum embedding "
                           "length " + std::to_string(computed));
    res.n_cap = n_cap;

    std::size_t threshold = opts.threshold_factor * n_cap;
    SummarizerGenerator gen(tm, threshold);

    Configuration c0 = initial_configuration(tm.initial, input);
    TokenSeq prompt{tok::CallOpen};
    append(prompt, embed_config(c0, tm.blank));
    prompt.push_back(kFrameSep);

    RunConfig cfg;
    cfg.max_local_space = 2 * (n_cap + threshold) + 32;
    cfg.max_depth = 4;
    cfg.max_steps = 16 * (res.tm_steps + n_cap + 16);
    cfg.loop_detection = opts.loop_detection;
    cfg.keep_step_log = opts.keep_step_log;
    cfg.observer = opts.observer;

    res.run = run(prompt, std::ref(gen), cfg);
    res.summarizations = gen.summarizations();
    if (res.run.is_answer() && res.run.answer.size() == 1) {
        if (res.run.answer[0] == "1")
            res.verdict = Verdict::Accept;
        else if (res.run.answer[0] == "0")
            res.verdict = Verdict::Reject;
    }
    return res;
}

}  // namespace recur
