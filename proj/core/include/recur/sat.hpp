#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "recur/runtime.hpp"

namespace recur {

struct SatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Nonzero literal: sign is polarity, magnitude is the 1-based variable index.
using Literal = int;
using Clause = std::vector<Literal>;

struct CnfFormula {
    int num_vars = 0;
    std::vector<Clause> clauses;
    std::vector<std::string> names;  // per variable; defaults to x1..xn
    std::string problem_text;        // [Root Problem] text; generated if empty
    std::string question;            // root task; generated if empty

    std::string name(int var) const;
    int var_by_name(const std::string& name) const;  // 0 when unknown
    void validate() const;

    std::string effective_problem_text() const;
    std::string effective_question() const;
};

CnfFormula parse_dimacs(const std::string& text);
std::string render_dimacs(const CnfFormula& f);

// Ordered partial assignment; insertion order is the branching order.
struct Assignment {
    std::vector<std::pair<int, bool>> values;

    std::optional<bool> get(int var) const;
    void set(int var, bool value);
    std::size_t size() const { return values.size(); }
};

enum class SatVerdict { Sat, Unsat };

struct BruteForceResult {
    SatVerdict verdict = SatVerdict::Unsat;
    std::vector<bool> witness;  // witness[v-1] for variable v when Sat
};

// Exhaustive enumeration; the oracle every solver answer is checked against.
// Requires num_vars <= 24.
BruteForceResult brute_force(const CnfFormula& f);

// Numbered one-clause-per-line rendering: "1. Either Alice or not Carol."
std::string render_conditions(const CnfFormula& f);
// Inverse of render_conditions given the variable names (test oracle).
std::vector<Clause> parse_conditions(const std::string& text,
                                     const std::vector<std::string>& names);

// Backtracking-search policy in the published trace format. Frames carry the
// cumulative assignment as their task; each invocation re-derives the clause
// analysis, branch choice, and phase from the frame content alone.
class DpllGenerator {
public:
    explicit DpllGenerator(CnfFormula f);

    TokenSeq operator()(const TokenSeq& view) const;

    const CnfFormula& formula() const { return f_; }

private:
    CnfFormula f_;
};

struct SatFrameParts {
    bool root = false;
    Assignment task;       // empty for the root
    std::string task_text; // rendered task (the root question for the root)
    TokenSeq rest;         // frame content after the task
};
// Splits a generator view (root question prefixing included) into task and
// emitted content. Throws GeneratorError on unparseable frames.
SatFrameParts split_sat_frame(const CnfFormula& f, const TokenSeq& view);

RunConfig default_sat_run_config();

struct SolveResult {
    std::string answer;  // "Yes" / "No" (empty when the run bottomed)
    RunResult run;
};

// Runs the policy through the context-stack runtime with question
// preservation and prompt prefixing enabled.
SolveResult solve(const CnfFormula& f,
                  RunConfig cfg = default_sat_run_config());

struct TraceSample {
    std::string user;
    std::string assistant_prefix;
    std::string assistant_content;

    bool operator==(const TraceSample&) const = default;
};

struct TraceSet {
    std::vector<TraceSample> samples;
    std::string answer;
    RunResult run;
};

// Replays the run and materializes one sample per generator invocation.
TraceSet gen_traces(const CnfFormula& f,
                    RunConfig cfg = default_sat_run_config());

std::string to_jsonl(const std::vector<TraceSample>& samples);
std::vector<TraceSample> parse_jsonl(const std::string& text);

// A generator that answers from recorded samples, keyed by (user, prefix).
// Replaying a trace set through run() must reproduce the original answer.
Generator replay_generator(const CnfFormula& f,
                           std::vector<TraceSample> samples);

// Uniform random 3-CNF over distinct variables per clause.
CnfFormula random_3cnf(int num_vars, int num_clauses, std::uint64_t seed);

// Difficulty bands by clause count: easy 4-19, medium 20-30, hard 31-50.
std::string band_for_clause_count(std::size_t clauses);

// The worked five-scientists instance (UNSAT).
CnfFormula five_scientists();

}  // namespace recur
