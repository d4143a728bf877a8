#include "recur/scaffold.hpp"

#include <algorithm>
#include <sstream>

namespace recur {

namespace {

struct BottomSignal {
    EvalBottom kind;
};

std::string seq_key(std::size_t index, const TokenSeq& input) {
    std::string key = std::to_string(index);
    for (const Token& t : input) {
        key += '\x01';
        key += t;
    }
    return key;
}

}  // namespace

const char* to_string(EvalBottom b) {
    switch (b) {
    case EvalBottom::Cycle: return "cycle";
    case EvalBottom::BudgetExceeded: return "budget_exceeded";
    case EvalBottom::SpaceExceeded: return "space_exceeded";
    }
    return "?";
}

std::size_t ScaffoldSystem::generator_index(const std::string& name) const {
    for (std::size_t i = 0; i < generators.size(); ++i)
        if (generators[i].name == name)
            return i;
    throw ScaffoldError("unknown generator '" + name + "'");
}

std::size_t ScaffoldSystem::scaffold_index(const std::string& name) const {
    for (std::size_t i = 0; i < scaffolds.size(); ++i)
        if (scaffolds[i].name == name)
            return i;
    throw ScaffoldError("unknown scaffold '" + name + "'");
}

void EvalBudget::validate() const {
    if (max_space == 0 || max_calls == 0 || max_depth == 0)
        throw ScaffoldError("evaluation budgets must be strictly positive");
}

TokenSeq ScaffoldCtx::gen(std::size_t index, const TokenSeq& query) {
    if (index >= session_.sys_.generators.size())
        throw ScaffoldError("generator oracle index out of range");
    session_.count_call();
    TokenSeq answer = session_.sys_.generators[index].fn(query);
    charge(input_.size() + state_ + query.size() + answer.size());
    return answer;
}

TokenSeq ScaffoldCtx::self(std::size_t index, const TokenSeq& query) {
    if (index >= session_.sys_.scaffolds.size())
        throw ScaffoldError("recursion oracle index out of range");
    TokenSeq answer = session_.eval_scaffold(index, query, depth_ + 1);
    charge(input_.size() + state_ + query.size() + answer.size());
    return answer;
}

void ScaffoldCtx::meter(std::size_t state_tokens) {
    state_ = state_tokens;
    charge(input_.size() + state_);
}

void ScaffoldCtx::charge(std::size_t amount) {
    used_ = std::max(used_, amount);
    session_.max_space_seen_ = std::max(session_.max_space_seen_, amount);
    if (amount > session_.budget_.max_space)
        throw BottomSignal{EvalBottom::SpaceExceeded};
}

EvalSession::EvalSession(const ScaffoldSystem& sys, EvalBudget budget)
    : sys_(sys), budget_(budget) {
    budget_.validate();
}

void EvalSession::count_call() {
    if (++invocations_ > budget_.max_calls)
        throw BottomSignal{EvalBottom::BudgetExceeded};
}

TokenSeq EvalSession::eval_scaffold(std::size_t index, const TokenSeq& input,
                                    std::size_t depth) {
    count_call();
    if (depth > budget_.max_depth)
        throw BottomSignal{EvalBottom::BudgetExceeded};
    max_depth_seen_ = std::max(max_depth_seen_, depth);

    std::string key = seq_key(index, input);
    if (auto it = memo_.find(key); it != memo_.end()) {
        if (it->second.defined)
            return it->second.output;
        throw BottomSignal{it->second.bottom};
    }
    if (in_progress_.count(key))
        throw BottomSignal{EvalBottom::Cycle};  // least fixpoint: undefined

    in_progress_[key] = true;
    ScaffoldCtx ctx(*this, input, depth);
    try {
        TokenSeq out = sys_.scaffolds[index].program(ctx, input);
        ctx.charge(input.size() + out.size());
        memo_[key] = {true, out, EvalBottom::Cycle};
        in_progress_.erase(key);
        return out;
    } catch (const BottomSignal& b) {
        in_progress_.erase(key);
        // Budget exhaustion depends on global counters, so it is not a
        // semantic property of the entry and is not memoized.
        if (b.kind != EvalBottom::BudgetExceeded)
            memo_[key] = {false, {}, b.kind};
        throw;
    } catch (...) {
        in_progress_.erase(key);
        throw;
    }
}

EvalOutcome EvalSession::evaluate(std::size_t scaffold_index,
                                  const TokenSeq& input) {
    if (scaffold_index >= sys_.scaffolds.size())
        throw ScaffoldError("scaffold index out of range");
    invocations_ = 0;
    max_depth_seen_ = 0;
    max_space_seen_ = 0;
    EvalOutcome out;
    try {
        out.output = eval_scaffold(scaffold_index, input, 1);
        out.defined = true;
    } catch (const BottomSignal& b) {
        out.defined = false;
        out.bottom = b.kind;
    }
    out.calls = invocations_;
    out.max_depth = max_depth_seen_;
    out.max_space = max_space_seen_;
    return out;
}

EvalOutcome evaluate(const ScaffoldSystem& sys, std::size_t scaffold_index,
                     const TokenSeq& input, const EvalBudget& budget) {
    EvalSession session(sys, budget);
    return session.evaluate(scaffold_index, input);
}

TokenSeq run_summarization_loop(
    TokenSeq x, const SeqFn& generate, const SeqFn& summarize,
    std::size_t max_len, std::size_t max_iters,
    const std::function<void(const TokenSeq&)>& on_step) {
    for (std::size_t it = 0;; ++it) {
        if (on_step)
            on_step(x);
        if (!x.empty() && x.back() == kStopToken)
            return x;
        if (it >= max_iters)
            throw ScaffoldError("summarization loop exceeded its budget");
        TokenSeq y = generate(x);
        x = (y.size() >= max_len) ? summarize(y) : std::move(y);
    }
}

TokenSeq run_diffusion_loop(
    TokenSeq x, const SeqFn& denoise,
    const std::function<TokenSeq(const TokenSeq&, const TokenSeq&)>&
        transition,
    std::size_t max_iters,
    const std::function<void(const TokenSeq&)>& on_step) {
    for (std::size_t it = 0;; ++it) {
        if (on_step)
            on_step(x);
        if (std::find(x.begin(), x.end(), kMaskToken) == x.end())
            return x;
        if (it >= max_iters)
            throw ScaffoldError("diffusion loop exceeded its budget");
        TokenSeq y = denoise(x);
        if (y.size() != x.size())
            throw ScaffoldError("denoiser changed the sequence length");
        TokenSeq next = transition(x, y);
        if (next.size() != x.size())
            throw ScaffoldError("transition changed the sequence length");
        x = std::move(next);
    }
}

TokenSeq majority_denoise(const TokenSeq& x) {
    std::map<Token, std::size_t> counts;
    for (const Token& t : x)
        if (t != kMaskToken)
            ++counts[t];
    Token fill = "0";
    std::size_t best = 0;
    for (const auto& [t, n] : counts) {
        if (n > best) {  // ties keep the lexicographically smallest
            best = n;
            fill = t;
        }
    }
    TokenSeq y = x;
    for (Token& t : y)
        if (t == kMaskToken)
            t = fill;
    return y;
}

TokenSeq overwrite_masks(const TokenSeq& x, const TokenSeq& y) {
    TokenSeq out = x;
    for (std::size_t i = 0; i < out.size() && i < y.size(); ++i)
        if (out[i] == kMaskToken)
            out[i] = y[i];
    return out;
}

SeqFn table_generator(std::map<std::string, std::string> table) {
    return [table = std::move(table)](const TokenSeq& query) -> TokenSeq {
        auto it = table.find(render(query));
        if (it == table.end())
            throw ScaffoldError("stub generator has no entry for query '" +
                                render(query) + "'");
        return tokenize(it->second);
    };
}

namespace {

std::vector<Token> split_list(const std::string& csv) {
    std::vector<Token> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

const std::string& arg_of(const std::map<std::string, std::string>& args,
                          const std::string& key, const std::string& kind) {
    auto it = args.find(key);
    if (it == args.end())
        throw ScaffoldError("scaffold kind '" + kind + "' needs a '" + key +
                            "=' argument");
    return it->second;
}

}  // namespace

ScaffoldProgram make_builtin_scaffold(
    const std::string& kind, const std::map<std::string, std::string>& args,
    const ScaffoldSystem& sys, std::size_t self_index) {
    if (kind == "identity") {
        return [](ScaffoldCtx& ctx, const TokenSeq& input) {
            ctx.meter(input.size());
            return input;
        };
    }
    if (kind == "const") {
        TokenSeq value = tokenize(arg_of(args, "value", kind));
        return [value](ScaffoldCtx& ctx, const TokenSeq&) {
            ctx.meter(value.size());
            return value;
        };
    }
    if (kind == "self_loop") {
        std::size_t target = args.count("target")
                                 ? sys.scaffold_index(args.at("target"))
                                 : self_index;
        return [target](ScaffoldCtx& ctx, const TokenSeq& input) {
            return ctx.self(target, input);
        };
    }
    if (kind == "rcm") {
        std::size_t gen = sys.generator_index(arg_of(args, "gen", kind));
        return [gen, self_index](ScaffoldCtx& ctx, const TokenSeq& input) {
            TokenSeq cur = input;
            for (;;) {
                ctx.meter(cur.size());
                TokenSeq cont = ctx.gen(gen, cur);
                TokenSeq y = concat(cur, cont);
                GeneratorOutput out = classify_output(y);
                if (out.kind == OutputKind::Return)
                    return out.payload;
                if (out.kind == OutputKind::Call) {
                    TokenSeq sub = ctx.self(self_index, out.payload);
                    cur = concat(out.prefix, sub);
                } else {
                    cur = std::move(y);
                }
            }
        };
    }
    if (kind == "summarize_loop") {
        std::size_t gen = sys.generator_index(arg_of(args, "gen", kind));
        std::size_t sum = sys.generator_index(arg_of(args, "sum", kind));
        std::size_t max_len = std::stoull(arg_of(args, "max_len", kind));
        return [gen, sum, max_len](ScaffoldCtx& ctx, const TokenSeq& input) {
            TokenSeq x = input;
            for (;;) {
                ctx.meter(x.size());
                if (!x.empty() && x.back() == kStopToken)
                    return x;
                TokenSeq y = ctx.gen(gen, x);
                x = (y.size() >= max_len) ? ctx.gen(sum, y) : std::move(y);
            }
        };
    }
    if (kind == "diffusion_loop") {
        std::size_t den = sys.generator_index(arg_of(args, "denoise", kind));
        return [den](ScaffoldCtx& ctx, const TokenSeq& input) {
            TokenSeq x = input;
            for (;;) {
                ctx.meter(x.size());
                if (std::find(x.begin(), x.end(), kMaskToken) == x.end())
                    return x;
                TokenSeq y = ctx.gen(den, x);
                if (y.size() != x.size())
                    throw ScaffoldError("denoiser changed the sequence "
                                        "length");
                x = overwrite_masks(x, y);
            }
        };
    }
    if (kind == "prover") {
        std::size_t gen = sys.generator_index(arg_of(args, "gen", kind));
        std::size_t verifier =
            sys.scaffold_index(arg_of(args, "verifier", kind));
        std::vector<Token> seeds = split_list(arg_of(args, "seeds", kind));
        if (seeds.empty())
            throw ScaffoldError("prover needs at least one seed");
        return [gen, verifier, seeds](ScaffoldCtx& ctx,
                                      const TokenSeq& input) {
            for (const Token& seed : seeds) {
                ctx.meter(input.size());
                TokenSeq q = input;
                q.push_back("|");
                q.push_back(seed);
                TokenSeq proof = ctx.gen(gen, q);
                TokenSeq vq = input;
                vq.push_back("|");
                append(vq, proof);
                TokenSeq verdict = ctx.self(verifier, vq);
                if (verdict == TokenSeq{"correct"})
                    return TokenSeq{"correct"};
            }
            return TokenSeq{"wrong"};
        };
    }
    if (kind == "verifier") {
        std::size_t gen = sys.generator_index(arg_of(args, "gen", kind));
        std::size_t prover = sys.scaffold_index(arg_of(args, "prover", kind));
        return [gen, prover](ScaffoldCtx& ctx, const TokenSeq& input) {
            ctx.meter(input.size());
            TokenSeq reply = ctx.gen(gen, input);
            if (reply.empty())
                throw ScaffoldError("verifier generator returned nothing");
            if (reply[0] == "correct" || reply[0] == "wrong")
                return TokenSeq{reply[0]};
            if (reply[0] != "incomplete")
                throw ScaffoldError("verifier generator returned unknown "
                                    "status '" + reply[0] + "'");
            for (std::size_t i = 1; i < reply.size(); ++i) {
                TokenSeq r = ctx.self(prover, TokenSeq{reply[i]});
                if (!(r == TokenSeq{"correct"}))
                    return TokenSeq{"wrong"};
            }
            return TokenSeq{"correct"};
        };
    }
    throw ScaffoldError("unknown scaffold kind '" + kind + "'");
}

SeqFn make_builtin_generator(const std::string& kind,
                             const std::map<std::string, std::string>& args) {
    if (kind == "identity")
        return [](const TokenSeq& q) { return q; };
    if (kind == "append") {
        Token t = arg_of(args, "tok", kind);
        return [t](const TokenSeq& q) {
            TokenSeq out = q;
            out.push_back(t);
            return out;
        };
    }
    if (kind == "keep_last") {
        std::size_t n = std::stoull(arg_of(args, "n", kind));
        return [n](const TokenSeq& q) {
            if (q.size() <= n)
                return q;
            return subseq(q, q.size() - n, q.size());
        };
    }
    if (kind == "const") {
        TokenSeq value = tokenize(arg_of(args, "value", kind));
        return [value](const TokenSeq&) { return value; };
    }
    if (kind == "majority_denoise")
        return [](const TokenSeq& q) { return majority_denoise(q); };
    throw ScaffoldError("unknown generator kind '" + kind + "'");
}

EvalOutcome run_prover_verifier(const TokenSeq& goal,
                                const std::vector<Token>& seeds,
                                const SeqFn& prover_gen,
                                const SeqFn& verifier_gen,
                                const EvalBudget& budget) {
    ScaffoldSystem sys;
    sys.name = "prover_verifier";
    sys.generators.push_back({"f_p", prover_gen});
    sys.generators.push_back({"f_v", verifier_gen});
    sys.scaffolds.push_back({"prover", {}});
    sys.scaffolds.push_back({"verifier", {}});
    std::string seed_csv;
    for (const Token& s : seeds) {
        if (!seed_csv.empty())
            seed_csv += ',';
        seed_csv += s;
    }
    sys.scaffolds[0].program = make_builtin_scaffold(
        "prover", {{"gen", "f_p"}, {"verifier", "verifier"},
                   {"seeds", seed_csv}},
        sys, 0);
    sys.scaffolds[1].program = make_builtin_scaffold(
        "verifier", {{"gen", "f_v"}, {"prover", "prover"}}, sys, 1);
    return evaluate(sys, 0, goal, budget);
}

ScaffoldSystem parse_scaffold_system(const std::string& text) {
    struct PendingScaffold {
        std::string name;
        std::string kind;
        std::map<std::string, std::string> args;
    };
    ScaffoldSystem sys;
    std::vector<PendingScaffold> pending;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool in_table = false;
    std::map<std::string, std::string> table;
    std::string table_name;

    auto fail = [&](const std::string& msg) {
        throw ScaffoldError("line " + std::to_string(lineno) + ": " + msg);
    };
    auto parse_args = [](const std::vector<std::string>& words,
                         std::size_t from) {
        std::map<std::string, std::string> args;
        for (std::size_t i = from; i < words.size(); ++i) {
            auto eq = words[i].find('=');
            if (eq == std::string::npos)
                throw ScaffoldError("expected key=value, got '" + words[i] +
                                    "'");
            args[words[i].substr(0, eq)] = words[i].substr(eq + 1);
        }
        return args;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos)
            line.resize(pos);
        std::istringstream ls(line);
        std::vector<std::string> words;
        std::string w;
        while (ls >> w)
            words.push_back(w);
        if (words.empty())
            continue;

        if (in_table) {
            if (words.size() == 1 && words[0] == "end") {
                sys.generators.push_back(
                    {table_name, table_generator(std::move(table))});
                table.clear();
                in_table = false;
                continue;
            }
            auto arrow = std::find(words.begin(), words.end(), "->");
            if (arrow == words.end())
                fail("table entry needs '->'");
            std::string key, value;
            for (auto it = words.begin(); it != arrow; ++it) {
                if (!key.empty())
                    key += ' ';
                key += *it;
            }
            for (auto it = arrow + 1; it != words.end(); ++it) {
                if (!value.empty())
                    value += ' ';
                value += *it;
            }
            table[key] = value;
            continue;
        }

        if (words[0] == "system") {
            if (words.size() != 2)
                fail("expected 'system NAME'");
            sys.name = words[1];
        } else if (words[0] == "generator") {
            if (words.size() < 3)
                fail("expected 'generator NAME table|builtin ...'");
            if (words[2] == "table") {
                in_table = true;
                table_name = words[1];
            } else if (words[2] == "builtin") {
                if (words.size() < 4)
                    fail("expected 'generator NAME builtin KIND'");
                sys.generators.push_back(
                    {words[1],
                     make_builtin_generator(words[3], parse_args(words, 4))});
            } else {
                fail("generator must be 'table' or 'builtin'");
            }
        } else if (words[0] == "scaffold") {
            if (words.size() < 3)
                fail("expected 'scaffold NAME KIND ...'");
            pending.push_back({words[1], words[2], parse_args(words, 3)});
        } else {
            fail("unknown directive '" + words[0] + "'");
        }
    }
    if (in_table)
        throw ScaffoldError("unterminated generator table");

    for (const PendingScaffold& p : pending)
        sys.scaffolds.push_back({p.name, {}});
    for (std::size_t i = 0; i < pending.size(); ++i)
        sys.scaffolds[i].program =
            make_builtin_scaffold(pending[i].kind, pending[i].args, sys, i);
    return sys;
}

}  // namespace recur
