#include "recur/sat.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "recur/backend.hpp"

namespace recur {

namespace {

std::string default_name(int var) { return "x" + std::to_string(var); }

std::string lit_text(const CnfFormula& f, Literal lit) {
    return (lit < 0 ? "~" : "") + f.name(std::abs(lit));
}

// "(Alice v ~Carol)" as word tokens.
TokenSeq clause_tokens(const CnfFormula& f, const std::vector<Literal>& lits,
                       const std::string& head) {
    TokenSeq out;
    if (!head.empty())
        out.push_back(head);
    if (lits.empty()) {
        out.push_back("()");
        return out;
    }
    for (std::size_t i = 0; i < lits.size(); ++i) {
        std::string word = lit_text(f, lits[i]);
        if (i == 0)
            word = "(" + word;
        if (i + 1 == lits.size())
            word += ")";
        out.push_back(word);
        if (i + 1 != lits.size())
            out.push_back("v");
    }
    return out;
}

void push_line(TokenSeq& out, std::initializer_list<Token> words) {
    out.insert(out.end(), words.begin(), words.end());
    out.push_back(tok::Newline);
}

TokenSeq assignment_tokens(const CnfFormula& f, const Assignment& asg) {
    TokenSeq out;
    for (std::size_t i = 0; i < asg.values.size(); ++i) {
        std::string word =
            f.name(asg.values[i].first) + "=" +
            (asg.values[i].second ? "True" : "False");
        if (i + 1 != asg.values.size())
            word += ",";
        out.push_back(word);
    }
    return out;
}

std::string assign_word(const CnfFormula& f, int var, bool value) {
    return f.name(var) + "=" + (value ? "True" : "False");
}

enum class ClauseStatus { Satisfied, Untouched, Simplified, Conflict };

ClauseStatus eval_clause(const Clause& cl, const Assignment& asg,
                         std::vector<Literal>& remaining) {
    remaining.clear();
    for (Literal lit : cl) {
        auto v = asg.get(std::abs(lit));
        if (!v) {
            remaining.push_back(lit);
        } else if (*v == (lit > 0)) {
            return ClauseStatus::Satisfied;
        }
    }
    if (remaining.empty())
        return ClauseStatus::Conflict;
    if (remaining.size() == cl.size())
        return ClauseStatus::Untouched;
    return ClauseStatus::Simplified;
}

struct Analysis {
    TokenSeq lines;
    bool conflict = false;
    bool all_satisfied = false;
    int branch_var = 0;
    bool branch_value = true;
    bool unit_branch = false;
};

Analysis analyze(const CnfFormula& f, const Assignment& asg, bool with_given) {
    Analysis a;
    if (with_given) {
        a.lines.push_back("Given:");
        append(a.lines, assignment_tokens(f, asg));
        a.lines.push_back(tok::Newline);
    }
    std::vector<std::pair<int, bool>> units;  // clause order
    std::set<int> open_vars;
    bool any_active = false;
    std::vector<Literal> remaining;
    for (std::size_t i = 0; i < f.clauses.size(); ++i) {
        const Clause& cl = f.clauses[i];
        push_line(a.lines, {"Condition", std::to_string(i + 1) + ":"});
        TokenSeq head = clause_tokens(f, cl, "  Clause:");
        append(a.lines, head);
        a.lines.push_back(tok::Newline);

        ClauseStatus st = eval_clause(cl, asg, remaining);
        if (st == ClauseStatus::Satisfied) {
            push_line(a.lines, {"  ->", "satisfied"});
            continue;
        }
        if (st == ClauseStatus::Conflict) {
            push_line(a.lines, {"  Simplify", "as:", "()", "->", "CONFLICT"});
            push_line(a.lines, {"Contradiction!"});
            a.conflict = true;
            return a;
        }
        if (st == ClauseStatus::Untouched) {
            push_line(a.lines, {"  (no", "simplification", "needed)"});
        } else {
            TokenSeq simp = clause_tokens(f, remaining, "  Simplify");
            simp.insert(simp.begin() + 1, "as:");
            append(a.lines, simp);
            a.lines.push_back(tok::Newline);
        }
        any_active = true;
        for (Literal lit : remaining)
            open_vars.insert(std::abs(lit));
        if (remaining.size() == 1) {
            int var = std::abs(remaining[0]);
            bool val = remaining[0] > 0;
            push_line(a.lines, {"  ->", "unit:", assign_word(f, var, val)});
            units.push_back({var, val});
        } else {
            push_line(a.lines, {"  ->", "(not", "unit)"});
        }
    }
    if (!any_active) {
        push_line(a.lines, {"All", "conditions", "are", "satisfied."});
        a.all_satisfied = true;
        return a;
    }
    if (!units.empty()) {
        a.branch_var = units[0].first;
        a.branch_value = units[0].second;
        a.unit_branch = true;
        push_line(a.lines, {"Unit", "clause", "found:",
                            assign_word(f, a.branch_var, a.branch_value)});
    } else {
        a.branch_var = *open_vars.begin();
        a.branch_value = true;
        TokenSeq line{"No", "unit", "clause", "found.", "Unassigned:"};
        std::size_t k = 0;
        for (int var : open_vars) {
            std::string word = f.name(var);
            if (k == 0)
                word = "[" + word;
            word += (k + 1 == open_vars.size()) ? "]" : ",";
            line.push_back(word);
            ++k;
        }
        append(a.lines, line);
        a.lines.push_back(tok::Newline);
    }
    return a;
}

TokenSeq return_block(const std::string& answer) {
    return {tok::RetOpen, answer, tok::RetClose};
}

TokenSeq branch_tokens(const CnfFormula& f, const Assignment& asg, int var,
                       bool value) {
    TokenSeq out;
    push_line(out, {"Try", f.name(var), "=", value ? "True" : "False"});
    Assignment next = asg;
    next.set(var, value);
    out.push_back(tok::CallOpen);
    append(out, assignment_tokens(f, next));
    out.push_back(tok::CallClose);
    return out;
}

bool parse_assignment_word(const CnfFormula& f, const Token& word,
                           bool* trailing_comma, int* var, bool* value) {
    std::string w = word;
    *trailing_comma = !w.empty() && w.back() == ',';
    if (*trailing_comma)
        w.pop_back();
    auto eq = w.find('=');
    if (eq == std::string::npos || eq == 0)
        return false;
    std::string name = w.substr(0, eq);
    std::string val = w.substr(eq + 1);
    if (val == "True")
        *value = true;
    else if (val == "False")
        *value = false;
    else
        return false;
    *var = f.var_by_name(name);
    return *var != 0;
}

}  // namespace

std::string CnfFormula::name(int var) const {
    if (var >= 1 && static_cast<std::size_t>(var) <= names.size())
        return names[var - 1];
    return default_name(var);
}

int CnfFormula::var_by_name(const std::string& n) const {
    if (!names.empty()) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == n)
                return static_cast<int>(i + 1);
        return 0;
    }
    if (n.size() >= 2 && n[0] == 'x') {
        int var = std::atoi(n.c_str() + 1);
        if (var >= 1 && var <= num_vars &&
            n == default_name(var))
            return var;
    }
    return 0;
}

void CnfFormula::validate() const {
    if (num_vars < 0)
        throw SatError("negative variable count");
    if (!names.empty() && names.size() != static_cast<std::size_t>(num_vars))
        throw SatError("name list does not match variable count");
    for (const Clause& cl : clauses) {
        for (Literal lit : cl) {
            if (lit == 0 || std::abs(lit) > num_vars)
                throw SatError("literal out of range");
        }
    }
}

std::string CnfFormula::effective_problem_text() const {
    if (!problem_text.empty())
        return problem_text;
    std::string vars;
    for (int v = 1; v <= num_vars; ++v) {
        if (!vars.empty())
            vars += ", ";
        vars += name(v);
    }
    return "Variables: " + vars +
           ". Each variable is independently True or False.\n\n"
           "Conditions:\n" +
           render_conditions(*this) + "\n" + effective_question();
}

std::string CnfFormula::effective_question() const {
    if (!question.empty())
        return question;
    return "Is there a way to assign values so all these conditions are "
           "satisfied?";
}

CnfFormula parse_dimacs(const std::string& text) {
    CnfFormula f;
    std::istringstream in(text);
    std::string line;
    bool seen_header = false;
    long declared_clauses = -1;
    Clause current;
    bool open_clause = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c' || line[0] == '%')
            continue;
        std::istringstream ls(line);
        if (!seen_header) {
            std::string p, fmt;
            if (!(ls >> p))
                continue;
            if (p != "p")
                throw SatError("expected 'p cnf' header before clauses");
            if (!(ls >> fmt >> f.num_vars >> declared_clauses) ||
                fmt != "cnf" || f.num_vars < 0 || declared_clauses < 0)
                throw SatError("malformed 'p cnf' header");
            seen_header = true;
            continue;
        }
        long lit;
        while (ls >> lit) {
            if (lit == 0) {
                f.clauses.push_back(current);
                current.clear();
                open_clause = false;
            } else {
                if (std::labs(lit) > f.num_vars)
                    throw SatError("literal out of range: " +
                                   std::to_string(lit));
                current.push_back(static_cast<Literal>(lit));
                open_clause = true;
            }
        }
        if (!ls.eof())
            throw SatError("non-integer token in clause section");
    }
    if (!seen_header)
        throw SatError("missing 'p cnf' header");
    if (open_clause)
        throw SatError("clause without terminating 0");
    if (static_cast<long>(f.clauses.size()) != declared_clauses)
        throw SatError("clause count does not match header");
    f.validate();
    return f;
}

std::string render_dimacs(const CnfFormula& f) {
    std::ostringstream out;
    out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << "\n";
    for (const Clause& cl : f.clauses) {
        for (Literal lit : cl)
            out << lit << ' ';
        out << "0\n";
    }
    return out.str();
}

std::optional<bool> Assignment::get(int var) const {
    for (const auto& [v, val] : values)
        if (v == var)
            return val;
    return std::nullopt;
}

void Assignment::set(int var, bool value) {
    for (auto& [v, val] : values) {
        if (v == var) {
            val = value;
            return;
        }
    }
    values.push_back({var, value});
}

BruteForceResult brute_force(const CnfFormula& f) {
    f.validate();
    if (f.num_vars > 24)
        throw SatError("brute force limited to 24 variables");
    BruteForceResult res;
    if (f.clauses.empty()) {
        res.verdict = SatVerdict::Sat;
        return res;
    }
    for (std::uint32_t mask = 0; mask < (1u << f.num_vars); ++mask) {
        bool ok = true;
        for (const Clause& cl : f.clauses) {
            bool sat = false;
            for (Literal lit : cl) {
                bool v = (mask >> (std::abs(lit) - 1)) & 1;
                if (v == (lit > 0)) {
                    sat = true;
                    break;
                }
            }
            if (!sat) {
                ok = false;
                break;
            }
        }
        if (ok) {
            res.verdict = SatVerdict::Sat;
            res.witness.resize(f.num_vars);
            for (int v = 1; v <= f.num_vars; ++v)
                res.witness[v - 1] = (mask >> (v - 1)) & 1;
            return res;
        }
    }
    res.verdict = SatVerdict::Unsat;
    return res;
}

std::string render_conditions(const CnfFormula& f) {
    std::string out;
    for (std::size_t i = 0; i < f.clauses.size(); ++i) {
        const Clause& cl = f.clauses[i];
        out += std::to_string(i + 1) + ". ";
        if (cl.size() == 1) {
            Literal lit = cl[0];
            out += lit > 0 ? f.name(lit) : "Not " + f.name(-lit);
        } else {
            out += "Either ";
            for (std::size_t j = 0; j < cl.size(); ++j) {
                if (j > 0)
                    out += " or ";
                Literal lit = cl[j];
                out += lit > 0 ? f.name(lit) : "not " + f.name(-lit);
            }
        }
        out += ".\n";
    }
    return out;
}

std::vector<Clause> parse_conditions(const std::string& text,
                                     const std::vector<std::string>& names) {
    auto var_of = [&](const std::string& n) -> Literal {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == n)
                return static_cast<Literal>(i + 1);
        throw SatError("unknown variable name '" + n + "'");
    };
    std::vector<Clause> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto dot = line.find(". ");
        if (dot == std::string::npos)
            throw SatError("condition line lacks numbering: " + line);
        std::string body = line.substr(dot + 2);
        if (body.empty() || body.back() != '.')
            throw SatError("condition line lacks final period: " + line);
        body.pop_back();
        Clause cl;
        if (body.rfind("Either ", 0) == 0) {
            body = body.substr(7);
            std::size_t pos = 0;
            while (true) {
                std::size_t next = body.find(" or ", pos);
                std::string piece = body.substr(
                    pos, next == std::string::npos ? std::string::npos
                                                   : next - pos);
                if (piece.rfind("not ", 0) == 0)
                    cl.push_back(-var_of(piece.substr(4)));
                else
                    cl.push_back(var_of(piece));
                if (next == std::string::npos)
                    break;
                pos = next + 4;
            }
        } else if (body.rfind("Not ", 0) == 0) {
            cl.push_back(-var_of(body.substr(4)));
        } else {
            cl.push_back(var_of(body));
        }
        out.push_back(cl);
    }
    return out;
}

DpllGenerator::DpllGenerator(CnfFormula f) : f_(std::move(f)) {
    f_.validate();
}

SatFrameParts split_sat_frame(const CnfFormula& f, const TokenSeq& view) {
    TokenSeq question = tokenize(f.effective_question());
    auto starts_with_question = [&](const TokenSeq& seq) {
        return seq.size() >= question.size() &&
               std::equal(question.begin(), question.end(), seq.begin());
    };
    // Drop the prompt-prefixing copy of the root question, if present.
    TokenSeq frame = view;
    if (starts_with_question(frame) && frame.size() > question.size())
        frame = subseq(frame, question.size(), frame.size());

    SatFrameParts parts;
    if (starts_with_question(frame)) {
        parts.root = true;
        parts.task_text = f.effective_question();
        parts.rest = subseq(frame, question.size(), frame.size());
        return parts;
    }
    std::size_t k = 0;
    bool expect_more = true;
    while (k < frame.size() && expect_more) {
        bool comma = false;
        int var = 0;
        bool value = false;
        if (!parse_assignment_word(f, frame[k], &comma, &var, &value))
            break;
        if (parts.task.get(var))
            throw GeneratorError("task assigns variable twice");
        parts.task.set(var, value);
        expect_more = comma;
        ++k;
    }
    if (parts.task.values.empty())
        throw GeneratorError("frame does not start with the root question or "
                             "an assignment task");
    if (expect_more)
        throw GeneratorError("assignment task ends with a comma");
    parts.task_text = render(assignment_tokens(f, parts.task));
    parts.rest = subseq(frame, k, frame.size());
    return parts;
}

TokenSeq DpllGenerator::operator()(const TokenSeq& view) const {
    SatFrameParts parts = split_sat_frame(f_, view);

    // Completed subcalls at this level leave "q. The answer is: A." lines.
    std::vector<std::string> answers;
    const TokenSeq& rest = parts.rest;
    for (std::size_t i = 0; i + 3 < rest.size(); ++i) {
        if (rest[i] == "The" && rest[i + 1] == "answer" &&
            rest[i + 2] == "is:") {
            std::string word = rest[i + 3];
            if (!word.empty() && word.back() == '.')
                word.pop_back();
            answers.push_back(word);
        }
    }
    for (const std::string& a : answers) {
        if (a == "Yes")
            return return_block("Yes");
        if (a != "No")
            throw GeneratorError("unrecognized subtask answer '" + a + "'");
    }

    Analysis a = analyze(f_, parts.task, !parts.root);
    if (answers.empty()) {
        TokenSeq out = std::move(a.lines);
        if (a.conflict) {
            append(out, return_block("No"));
            return out;
        }
        if (a.all_satisfied) {
            append(out, return_block("Yes"));
            return out;
        }
        append(out, branch_tokens(f_, parts.task, a.branch_var,
                                  a.branch_value));
        return out;
    }
    if (a.conflict || a.all_satisfied)
        throw GeneratorError("frame has subtask answers but no branch point");
    if (answers.size() == 1)
        return branch_tokens(f_, parts.task, a.branch_var, !a.branch_value);
    if (answers.size() == 2) {
        TokenSeq out;
        push_line(out, {"Both", "branches", "failed."});
        append(out, return_block("No"));
        return out;
    }
    throw GeneratorError("frame records more than two subtask answers");
}

RunConfig default_sat_run_config() {
    RunConfig cfg;
    cfg.prompt_prefixing = true;
    cfg.question_preservation = true;
    cfg.max_steps = 2'000'000;
    cfg.max_depth = 10'000;
    cfg.max_local_space = std::size_t{1} << 20;
    return cfg;
}

namespace {

SolveResult run_sat(const CnfFormula& f, RunConfig cfg) {
    DpllGenerator gen(f);
    SolveResult res;
    res.run = run(tokenize(f.effective_question()), std::cref(gen), cfg);
    if (res.run.is_answer() && res.run.answer.size() == 1)
        res.answer = res.run.answer[0];
    return res;
}

}  // namespace

SolveResult solve(const CnfFormula& f, RunConfig cfg) {
    cfg.prompt_prefixing = true;
    cfg.question_preservation = true;
    return run_sat(f, cfg);
}

TraceSet gen_traces(const CnfFormula& f, RunConfig cfg) {
    cfg.prompt_prefixing = true;
    cfg.question_preservation = true;
    TraceSet set;
    std::string problem = f.effective_problem_text();
    StepObserver inner = cfg.observer;
    cfg.observer = [&](const StepEvent& e) {
        SatFrameParts parts = split_sat_frame(f, e.view);
        TraceSample s;
        s.user = build_prompt(problem, parts.task_text);
        s.assistant_prefix = render(parts.rest);
        s.assistant_content = render(e.continuation);
        set.samples.push_back(std::move(s));
        if (inner)
            inner(e);
    };
    SolveResult r = run_sat(f, cfg);
    set.answer = r.answer;
    set.run = std::move(r.run);
    return set;
}

std::string to_jsonl(const std::vector<TraceSample>& samples) {
    std::string out;
    for (const TraceSample& s : samples) {
        nlohmann::json j;
        j["user"] = s.user;
        j["assistant_prefix"] = s.assistant_prefix;
        j["assistant_content"] = s.assistant_content;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<TraceSample> parse_jsonl(const std::string& text) {
    std::vector<TraceSample> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        nlohmann::json j = nlohmann::json::parse(line);
        TraceSample s;
        s.user = j.at("user").get<std::string>();
        s.assistant_prefix = j.at("assistant_prefix").get<std::string>();
        s.assistant_content = j.at("assistant_content").get<std::string>();
        out.push_back(std::move(s));
    }
    return out;
}

Generator replay_generator(const CnfFormula& f,
                           std::vector<TraceSample> samples) {
    auto table = std::make_shared<
        std::unordered_map<std::string, std::string>>();
    std::string problem = f.effective_problem_text();
    for (TraceSample& s : samples) {
        (*table)[s.user + '\x01' + s.assistant_prefix] =
            std::move(s.assistant_content);
    }
    CnfFormula formula = f;
    return [table, formula = std::move(formula),
            problem = std::move(problem)](const TokenSeq& view) -> TokenSeq {
        SatFrameParts parts = split_sat_frame(formula, view);
        std::string key =
            build_prompt(problem, parts.task_text) + '\x01' +
            render(parts.rest);
        auto it = table->find(key);
        if (it == table->end())
            throw GeneratorError("no recorded sample for this view");
        return tokenize(it->second);
    };
}

CnfFormula random_3cnf(int num_vars, int num_clauses, std::uint64_t seed) {
    if (num_vars < 3)
        throw SatError("random 3-CNF needs at least 3 variables");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> var_dist(1, num_vars);
    std::bernoulli_distribution sign_dist(0.5);
    CnfFormula f;
    f.num_vars = num_vars;
    for (int i = 0; i < num_clauses; ++i) {
        std::set<int> vars;
        while (vars.size() < 3)
            vars.insert(var_dist(rng));
        Clause cl;
        for (int v : vars)
            cl.push_back(sign_dist(rng) ? v : -v);
        f.clauses.push_back(std::move(cl));
    }
    return f;
}

std::string band_for_clause_count(std::size_t clauses) {
    if (clauses >= 4 && clauses <= 19)
        return "easy";
    if (clauses >= 20 && clauses <= 30)
        return "medium";
    if (clauses >= 31 && clauses <= 50)
        return "hard";
    return "other";
}

CnfFormula five_scientists() {
    CnfFormula f;
    f.num_vars = 5;
    f.names = {"Alice", "Bob", "Carol", "Dave", "Eve"};
    f.clauses = {{1, -3}, {-1, 3}, {1, 3}, {-1, -3}, {-3, -5}};
    f.question =
        "Is there a way to assign decisions so all these conditions are "
        "satisfied?";
    f.problem_text =
        "Five scientists--Alice, Bob, Carol, Dave, and Eve--are considering "
        "whether to join a new research project. Each scientist makes an "
        "independent decision about their participation. They may choose to "
        "join or not join the project regardless of others' choices.\n"
        "\n"
        "Conditions:\n"
        "1. Either Alice joins the project or Carol does not join.\n"
        "2. Either Alice does not join or Carol joins.\n"
        "3. Either Alice joins or Carol joins.\n"
        "4. Either Alice does not join or Carol does not join.\n"
        "5. Either Carol does not join or Eve does not join.\n"
        "\n" +
        f.question;
    return f;
}

}  // namespace recur
