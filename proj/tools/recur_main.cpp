// Unified command-line surface for the context-stack runtime, the machine
// simulators, the SAT engine, and scaffold evaluation.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "recur/atm_eval.hpp"
#include "recur/backend.hpp"
#include "recur/builtin_machines.hpp"
#include "recur/config.hpp"
#include "recur/rec_tm.hpp"
#include "recur/report.hpp"
#include "recur/runtime.hpp"
#include "recur/sat.hpp"
#include "recur/scaffold.hpp"
#include "recur/summarizer.hpp"
#include "recur/turing.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitBottom = 3;
constexpr int kExitMismatch = 4;
constexpr int kExitBackend = 5;

struct CommonOpts {
    std::optional<std::string> config_path;
    std::string steps_csv;
    bool stats = false;
};

recur::ConfigMap load_cfg(const CommonOpts& common) {
    return recur::load_config(common.config_path);
}

recur::RunConfig base_run_config(const recur::ConfigMap& cfg) {
    recur::RunConfig rc;
    rc.max_steps = cfg.get_u64("limits.max_steps", rc.max_steps);
    rc.max_depth = cfg.get_u64("limits.max_depth", rc.max_depth);
    rc.max_local_space =
        cfg.get_u64("limits.max_local_space", rc.max_local_space);
    return rc;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::invalid_argument("cannot write '" + path + "'");
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void maybe_dump_steps(const CommonOpts& common, const recur::RunResult& r) {
    if (!common.steps_csv.empty())
        write_file(common.steps_csv, recur::render_step_csv(r.trace));
}

int finish_run(const CommonOpts& common, const recur::RunResult& r,
               const std::string& answer_line) {
    maybe_dump_steps(common, r);
    if (r.is_answer()) {
        std::cout << answer_line << "\n";
        if (common.stats)
            std::cout << recur::render_trace_record(r.trace) << "\n";
        return kExitOk;
    }
    std::cout << "bottom: " << recur::to_string(r.reason);
    if (r.reason == recur::BottomReason::LimitExceeded)
        std::cout << " (" << recur::to_string(r.limit) << ")";
    std::cout << "\n";
    if (!r.detail.empty())
        std::cerr << "detail: " << r.detail << "\n";
    if (common.stats)
        std::cout << recur::render_trace_record(r.trace) << "\n";
    return kExitBottom;
}

recur::Generator script_generator(const std::string& path) {
    auto lines = std::make_shared<std::vector<recur::TokenSeq>>();
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line))
        lines->push_back(recur::tokenize(line));
    auto step = std::make_shared<std::size_t>(0);
    return [lines, step](const recur::TokenSeq&) -> recur::TokenSeq {
        if (*step >= lines->size())
            throw recur::GeneratorError("script exhausted");
        return (*lines)[(*step)++];
    };
}

// ---- subcommand bodies ----

int cmd_run(const CommonOpts& common, const std::string& prompt_text,
            const std::string& script, bool use_backend,
            const std::string& backend_url, const std::string& model,
            bool prefix_root, bool preserve_questions) {
    recur::ConfigMap cfg = load_cfg(common);
    recur::RunConfig rc = base_run_config(cfg);
    rc.prompt_prefixing = prefix_root;
    rc.question_preservation = preserve_questions;
    rc.keep_step_log = !common.steps_csv.empty();

    recur::TokenSeq prompt = recur::tokenize(prompt_text);
    recur::Generator gen;
    if (use_backend) {
        recur::BackendConfig bc;
        bc.base_url = backend_url.empty()
                          ? cfg.get("backend.base_url")
                          : backend_url;
        bc.model = model.empty() ? cfg.get("backend.model") : model;
        bc.api_key_env = cfg.get("backend.api_key_env", bc.api_key_env);
        gen = recur::llm_generator(
            std::make_shared<recur::Backend>(bc), prompt_text);
    } else if (!script.empty()) {
        gen = script_generator(script);
    } else {
        gen = [](const recur::TokenSeq& view) {
            recur::TokenSeq out{recur::tok::RetOpen};
            recur::append(out, view);
            out.push_back(recur::tok::RetClose);
            return out;
        };
    }
    recur::RunResult r = recur::run(prompt, gen, rc);
    return finish_run(common, r, recur::render(r.answer));
}

int cmd_tm_run(const CommonOpts& common, const std::string& machine,
               const std::string& input, std::uint64_t max_steps) {
    recur::TuringMachine tm =
        recur::parse_tm(recur::load_machine_text(machine));
    auto x = recur::parse_tape_input(tm.alphabet, tm.blank, input);
    recur::TmRunResult r = recur::run_tm(tm, x, max_steps);
    std::cout << recur::to_string(r.verdict) << "\n";
    if (common.stats)
        std::cout << "time=" << r.time << " space=" << r.space << "\n";
    return r.verdict == recur::Verdict::Timeout ? kExitBottom : kExitOk;
}

int cmd_tm_win(const std::string& machine, const std::string& input,
               std::size_t budget) {
    recur::AlternatingTM atm =
        recur::normalize_atm(recur::parse_atm(recur::load_machine_text(machine)));
    auto x = recur::parse_tape_input(atm.alphabet, atm.blank, input);
    int v = recur::win_value(
        atm, recur::initial_configuration(atm.initial, x), budget);
    std::cout << v << "\n";
    return kExitOk;
}

int cmd_tm_recursive(const CommonOpts& common, const std::string& machine,
                     const std::string& input, bool memo,
                     const std::string& cost_report,
                     std::uint64_t cost_max_t, bool check) {
    recur::TuringMachine tm =
        recur::parse_tm(recur::load_machine_text(machine));
    auto x = recur::parse_tape_input(tm.alphabet, tm.blank, input);

    if (!cost_report.empty()) {
        std::string csv = "t,V_measured,C_measured,V_bound,C_bound\n";
        for (std::uint64_t t = 0; t <= cost_max_t; ++t) {
            std::uint64_t v = std::max(
                recur::measure_cost(tm, x, recur::RecFn::State, t),
                recur::measure_cost(tm, x, recur::RecFn::Pos, t));
            std::uint64_t c = 0;
            for (std::int64_t p = -static_cast<std::int64_t>(t);
                 p <= static_cast<std::int64_t>(t); ++p)
                c = std::max(c, recur::measure_cost(tm, x, recur::RecFn::Cell,
                                                    t, p));
            recur::CostBound b = recur::cost_bound(t);
            csv += std::to_string(t) + ',' + std::to_string(v) + ',' +
                   std::to_string(c) + ',' + recur::u128_to_string(b.v) +
                   ',' + recur::u128_to_string(b.c) + '\n';
        }
        write_file(cost_report, csv);
    }

    recur::RecRunLimits limits;
    limits.keep_step_log = !common.steps_csv.empty();
    recur::DecideResult d = recur::decide(tm, x, memo, limits);
    int rc = finish_run(common, d.run, recur::to_string(d.verdict));
    if (rc != kExitOk)
        return rc;
    if (check) {
        recur::TmRunResult direct = recur::run_tm(tm, x, 1u << 22);
        if (direct.verdict != d.verdict) {
            std::cerr << "oracle mismatch: direct simulation says "
                      << recur::to_string(direct.verdict) << "\n";
            return kExitMismatch;
        }
    }
    return kExitOk;
}

int cmd_tm_summarize(const CommonOpts& common, const std::string& machine,
                     const std::string& input, std::size_t n_override,
                     std::size_t factor, bool check) {
    recur::TuringMachine tm =
        recur::parse_tm(recur::load_machine_text(machine));
    auto x = recur::parse_tape_input(tm.alphabet, tm.blank, input);
    recur::SummarizeOptions opts;
    opts.n_override = n_override;
    opts.threshold_factor = factor;
    opts.keep_step_log = !common.steps_csv.empty();
    recur::SummarizeResult r = recur::simulate_summarized(tm, x, opts);
    int rc = finish_run(common, r.run, recur::to_string(r.verdict));
    if (rc != kExitOk)
        return rc;
    double ratio = r.tm_steps
                       ? static_cast<double>(r.run.trace.total_tokens_emitted) /
                             static_cast<double>(r.tm_steps)
                       : 0.0;
    std::cout << "N=" << r.n_cap << " tm_steps=" << r.tm_steps
              << " summaries=" << r.summarizations << " tokens="
              << r.run.trace.total_tokens_emitted << " tokens_per_step=";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", ratio);
    std::cout << buf << "\n";
    if (check) {
        recur::TmRunResult direct = recur::run_tm(tm, x, opts.max_tm_steps);
        if (direct.verdict != r.verdict) {
            std::cerr << "oracle mismatch: direct simulation says "
                      << recur::to_string(direct.verdict) << "\n";
            return kExitMismatch;
        }
    }
    return kExitOk;
}

int cmd_atm_eval(const CommonOpts& common, const std::string& machine,
                 const std::string& input, bool check) {
    recur::AlternatingTM atm =
        recur::parse_atm(recur::load_machine_text(machine));
    auto x = recur::parse_tape_input(atm.alphabet, atm.blank, input);
    recur::RunConfig cfg = recur::default_atm_run_config();
    cfg.keep_step_log = !common.steps_csv.empty();
    recur::AtmEvalResult r = recur::eval_atm(atm, x, cfg);
    int rc = finish_run(common, r.run, std::to_string(r.value));
    if (rc != kExitOk)
        return rc;
    if (check) {
        recur::AlternatingTM norm = recur::normalize_atm(atm);
        int direct = recur::win_value(
            norm, recur::initial_configuration(norm.initial, x), 1u << 20);
        if (direct != r.value) {
            std::cerr << "oracle mismatch: win_value says " << direct << "\n";
            return kExitMismatch;
        }
    }
    return kExitOk;
}

recur::CnfFormula load_formula(const std::string& dimacs,
                               bool five_scientists) {
    if (five_scientists)
        return recur::five_scientists();
    if (dimacs.empty())
        throw std::invalid_argument(
            "need --dimacs FILE or --five-scientists");
    return recur::parse_dimacs(read_file(dimacs));
}

int cmd_sat_solve(const CommonOpts& common, const std::string& dimacs,
                  bool five, bool check) {
    recur::CnfFormula f = load_formula(dimacs, five);
    recur::RunConfig cfg = recur::default_sat_run_config();
    cfg.keep_step_log = !common.steps_csv.empty();
    recur::SolveResult r = recur::solve(f, cfg);
    int rc = finish_run(common, r.run, r.answer);
    if (rc != kExitOk)
        return rc;
    if (check) {
        auto oracle = recur::brute_force(f);
        std::string expect =
            oracle.verdict == recur::SatVerdict::Sat ? "Yes" : "No";
        if (expect != r.answer) {
            std::cerr << "oracle mismatch: brute force says " << expect
                      << "\n";
            return kExitMismatch;
        }
    }
    return kExitOk;
}

int cmd_sat_gen_traces(const CommonOpts& common, const std::string& dimacs,
                       bool five, const std::string& out_path) {
    recur::CnfFormula f = load_formula(dimacs, five);
    recur::RunConfig cfg = recur::default_sat_run_config();
    cfg.keep_step_log = !common.steps_csv.empty();
    recur::TraceSet traces = recur::gen_traces(f, cfg);
    if (!traces.run.is_answer())
        return finish_run(common, traces.run, "");
    write_file(out_path, recur::to_jsonl(traces.samples));
    maybe_dump_steps(common, traces.run);
    std::cout << traces.answer << "\n";
    std::cerr << traces.samples.size() << " samples written to " << out_path
              << "\n";
    if (common.stats)
        std::cout << recur::render_trace_record(traces.run.trace) << "\n";
    return kExitOk;
}

int cmd_sat_bench(const CommonOpts& common, const std::string& dir,
                  const std::string& report_path, std::size_t workers) {
    namespace fs = std::filesystem;
    recur::ConfigMap cfg = load_cfg(common);
    if (workers == 0)
        workers = static_cast<std::size_t>(cfg.get_u64("bench.workers", 2));

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".cnf")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw std::invalid_argument("no .cnf files in '" + dir + "'");

    std::vector<recur::BenchRow> rows(files.size());
    recur::parallel_for(files.size(), workers, [&](std::size_t i) {
        recur::CnfFormula f = recur::parse_dimacs(read_file(files[i]));
        recur::BenchRow row;
        row.id = files[i].filename().string();
        row.band = recur::band_for_clause_count(f.clauses.size());
        auto t0 = std::chrono::steady_clock::now();
        recur::SolveResult r = recur::solve(f);
        auto t1 = std::chrono::steady_clock::now();
        row.wall_ms =
            std::chrono::duration<double, std::milli>(t1 - t0).count();
        row.verdict = r.run.is_answer()
                          ? r.answer
                          : std::string("bottom:") +
                                recur::to_string(r.run.reason);
        if (f.num_vars <= 24) {
            row.oracle = recur::brute_force(f).verdict ==
                                 recur::SatVerdict::Sat
                             ? "Yes"
                             : "No";
        } else {
            row.oracle = "-";
        }
        row.trajectory_tokens = r.run.trace.total_tokens_emitted;
        row.max_active_context = r.run.trace.max_local_space;
        row.max_depth = r.run.trace.max_depth;
        row.steps = r.run.trace.total_steps;
        rows[i] = std::move(row);
    });

    if (!report_path.empty())
        write_file(report_path, recur::render_rows_csv(rows));
    std::cout << recur::render_summary_csv(recur::summarize_bands(rows));
    for (const recur::BenchRow& row : rows) {
        if (row.oracle != "-" && row.verdict != row.oracle) {
            std::cerr << "oracle mismatch on " << row.id << ": got "
                      << row.verdict << ", oracle " << row.oracle << "\n";
            return kExitMismatch;
        }
    }
    return kExitOk;
}

int cmd_scaffold_run(const std::string& system_path, const std::string& entry,
                     const std::string& input, std::size_t space,
                     std::size_t calls, std::size_t depth) {
    recur::ScaffoldSystem sys =
        recur::parse_scaffold_system(read_file(system_path));
    std::size_t index;
    try {
        index = sys.scaffold_index(entry);
    } catch (const recur::ScaffoldError&) {
        index = std::stoull(entry);
        if (index >= sys.scaffolds.size())
            throw std::invalid_argument("no scaffold named or numbered '" +
                                        entry + "'");
    }
    recur::EvalBudget budget;
    budget.max_space = space;
    budget.max_calls = calls;
    budget.max_depth = depth;
    recur::EvalOutcome out =
        recur::evaluate(sys, index, recur::tokenize(input), budget);
    std::cerr << "space=" << out.max_space << " calls=" << out.calls
              << " depth=" << out.max_depth << "\n";
    if (!out.defined) {
        std::cout << "bottom: " << recur::to_string(out.bottom) << "\n";
        return kExitBottom;
    }
    std::cout << recur::render(out.output) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recur: a context-stack runtime for recursive generators"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--config", common.config_path,
                   "config file (key = value); RECUR_CONFIG is the fallback");
    app.add_option("--steps-csv", common.steps_csv,
                   "write a per-step depth/ls/gs CSV");
    app.add_flag("--stats", common.stats,
                 "print the resource-trace record after the answer");

    // run
    auto* run_cmd = app.add_subcommand("run", "run a prompt through the "
                                              "context-stack machine");
    std::string prompt_text, script, backend_url, model;
    bool use_backend = false, prefix_root = false, preserve = false;
    run_cmd->add_option("--prompt", prompt_text, "initial context")
        ->required();
    run_cmd->add_option("--script", script,
                        "scripted generator: one continuation per line");
    run_cmd->add_flag("--backend", use_backend,
                      "drive an OpenAI-compatible endpoint");
    run_cmd->add_option("--backend-url", backend_url, "endpoint base URL");
    run_cmd->add_option("--model", model, "model name");
    run_cmd->add_flag("--prefix-root", prefix_root,
                      "prepend the root prompt to every generator view");
    run_cmd->add_flag("--preserve-questions", preserve,
                      "keep subtask descriptions in parent contexts");

    // tm
    auto* tm = app.add_subcommand("tm", "deterministic machine commands");
    tm->require_subcommand(1);
    std::string tm_machine, tm_input;
    std::uint64_t tm_max_steps = 1u << 22;
    auto* tm_run = tm->add_subcommand("run", "direct simulation");
    tm->add_subcommand("direct", "alias of 'tm run'");
    auto* tm_direct = tm->get_subcommand("direct");
    auto* tm_win = tm->add_subcommand("win", "game value of an alternating "
                                             "machine (direct oracle)");
    auto* tm_rec = tm->add_subcommand("recursive",
                                      "decide via the recursive-function "
                                      "frames");
    auto* tm_sum = tm->add_subcommand("summarize",
                                      "decide via depth-2 summarized "
                                      "simulation");
    for (CLI::App* sc : {tm_run, tm_direct, tm_win, tm_rec, tm_sum}) {
        sc->add_option("--machine", tm_machine,
                       "builtin machine name or descriptor file")
            ->required();
        sc->add_option("--input", tm_input, "tape input");
    }
    tm_run->add_option("--max-steps", tm_max_steps, "step budget");
    tm_direct->add_option("--max-steps", tm_max_steps, "step budget");
    std::size_t win_budget = 1u << 20;
    tm_win->add_option("--budget", win_budget, "configuration budget");
    bool memo = false, tm_check = false;
    std::string cost_report;
    std::uint64_t cost_max_t = 5;
    tm_rec->add_flag("--memo", memo, "cache subproblem results");
    tm_rec->add_option("--cost-report", cost_report,
                       "write V/C invocation counts and bounds as CSV");
    tm_rec->add_option("--cost-max-t", cost_max_t,
                       "largest t in the cost report");
    tm_rec->add_flag("--check", tm_check, "compare against run_tm");
    std::size_t n_override = 0, factor = 2;
    bool sum_check = false;
    tm_sum->add_option("--N", n_override, "embedding cap (computed if 0)");
    tm_sum->add_option("--factor", factor,
                       "summarize when the new trace reaches factor*N");
    tm_sum->add_flag("--check", sum_check, "compare against run_tm");

    // atm
    auto* atm = app.add_subcommand("atm", "alternating machine commands");
    atm->require_subcommand(1);
    auto* atm_eval = atm->add_subcommand("eval",
                                         "evaluate via call/return "
                                         "recursion");
    std::string atm_machine, atm_input;
    bool atm_check = false;
    atm_eval->add_option("--machine", atm_machine, "builtin name or file")
        ->required();
    atm_eval->add_option("--input", atm_input, "tape input");
    atm_eval->add_flag("--check", atm_check, "compare against win_value");

    // sat
    auto* sat = app.add_subcommand("sat", "CNF satisfiability commands");
    sat->require_subcommand(1);
    std::string dimacs, traces_out, bench_dir, bench_report;
    bool five = false, sat_check = false;
    std::size_t workers = 0;
    auto* sat_solve = sat->add_subcommand("solve", "recursive DPLL search");
    auto* sat_traces = sat->add_subcommand("gen-traces",
                                           "export training samples as "
                                           "JSONL");
    auto* sat_bench = sat->add_subcommand("bench",
                                          "solve a directory of DIMACS "
                                          "files and report metrics");
    for (CLI::App* sc : {sat_solve, sat_traces}) {
        sc->add_option("--dimacs", dimacs, "DIMACS CNF file");
        sc->add_flag("--five-scientists", five,
                     "use the built-in worked instance");
    }
    sat_solve->add_flag("--check", sat_check, "compare against brute force");
    sat_traces->add_option("--out", traces_out, "output JSONL path")
        ->required();
    sat_bench->add_option("--dir", bench_dir, "directory of .cnf files")
        ->required();
    sat_bench->add_option("--report", bench_report, "per-instance CSV path");
    sat_bench->add_option("--workers", workers, "worker pool size");

    // scaffold
    auto* scaffold = app.add_subcommand("scaffold",
                                        "recursive agentic systems");
    scaffold->require_subcommand(1);
    auto* scaffold_run = scaffold->add_subcommand("run",
                                                  "evaluate a scaffold on "
                                                  "an input");
    std::string system_path, entry = "0", scaffold_input;
    std::size_t space = 1u << 16, calls = 100'000, depth = 1'000;
    scaffold_run->add_option("--system", system_path, "system descriptor")
        ->required();
    scaffold_run->add_option("--entry", entry, "scaffold name or index");
    scaffold_run->add_option("--input", scaffold_input, "input text");
    scaffold_run->add_option("--space", space, "per-invocation space bound");
    scaffold_run->add_option("--calls", calls, "global call budget");
    scaffold_run->add_option("--depth", depth, "recursion depth budget");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd)
            return cmd_run(common, prompt_text, script, use_backend,
                           backend_url, model, prefix_root, preserve);
        if (*tm_run || *tm_direct)
            return cmd_tm_run(common, tm_machine, tm_input, tm_max_steps);
        if (*tm_win)
            return cmd_tm_win(tm_machine, tm_input, win_budget);
        if (*tm_rec)
            return cmd_tm_recursive(common, tm_machine, tm_input, memo,
                                    cost_report, cost_max_t, tm_check);
        if (*tm_sum)
            return cmd_tm_summarize(common, tm_machine, tm_input, n_override,
                                    factor, sum_check);
        if (*atm_eval)
            return cmd_atm_eval(common, atm_machine, atm_input, atm_check);
        if (*sat_solve)
            return cmd_sat_solve(common, dimacs, five, sat_check);
        if (*sat_traces)
            return cmd_sat_gen_traces(common, dimacs, five, traces_out);
        if (*sat_bench)
            return cmd_sat_bench(common, bench_dir, bench_report, workers);
        if (*scaffold_run)
            return cmd_scaffold_run(system_path, entry, scaffold_input,
                                    space, calls, depth);
        std::cerr << "no subcommand selected\n";
        return kExitUsage;
    } catch (const recur::BackendError& e) {
        std::cerr << "backend error (" << recur::to_string(e.kind)
                  << "): " << e.what() << "\n";
        return kExitBackend;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
