#include "recur/report.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace recur {

namespace {

bool needs_quotes(const std::string& s) {
    return s.find_first_of(",\"\n") != std::string::npos;
}

std::string csv_field(const std::string& s) {
    if (!needs_quotes(s))
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_ms(double ms) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", ms);
    return buf;
}

}  // namespace

std::string render_rows_csv(const std::vector<BenchRow>& rows) {
    std::string out =
        "id,band,verdict,oracle,trajectory,max_active_context,max_depth,"
        "steps,wall_ms\n";
    for (const BenchRow& r : rows) {
        out += csv_field(r.id) + ',' + csv_field(r.band) + ',' +
               csv_field(r.verdict) + ',' + csv_field(r.oracle) + ',' +
               std::to_string(r.trajectory_tokens) + ',' +
               std::to_string(r.max_active_context) + ',' +
               std::to_string(r.max_depth) + ',' + std::to_string(r.steps) +
               ',' + format_ms(r.wall_ms) + '\n';
    }
    return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n') {
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            field.clear();
            row.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<BenchRow> parse_rows_csv(const std::string& text) {
    auto cells = parse_csv(text);
    if (cells.empty())
        throw std::invalid_argument("empty CSV");
    std::vector<BenchRow> rows;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        const auto& c = cells[i];
        if (c.size() != 9)
            throw std::invalid_argument("bench CSV row needs 9 fields");
        BenchRow r;
        r.id = c[0];
        r.band = c[1];
        r.verdict = c[2];
        r.oracle = c[3];
        r.trajectory_tokens = std::stoull(c[4]);
        r.max_active_context = std::stoull(c[5]);
        r.max_depth = std::stoull(c[6]);
        r.steps = std::stoull(c[7]);
        r.wall_ms = std::stod(c[8]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<BandSummary> summarize_bands(const std::vector<BenchRow>& rows) {
    if (rows.empty())
        throw std::invalid_argument("no rows to summarize");
    std::vector<std::string> order{"easy", "medium", "hard"};
    for (const BenchRow& r : rows)
        if (std::find(order.begin(), order.end(), r.band) == order.end())
            order.push_back(r.band);
    std::vector<BandSummary> out;
    for (const std::string& band : order) {
        BandSummary s;
        s.band = band;
        double traj = 0, ls = 0;
        for (const BenchRow& r : rows) {
            if (r.band != band)
                continue;
            ++s.count;
            traj += static_cast<double>(r.trajectory_tokens);
            ls += static_cast<double>(r.max_active_context);
        }
        if (s.count == 0)
            continue;
        s.mean_trajectory = traj / static_cast<double>(s.count);
        s.mean_active_context = ls / static_cast<double>(s.count);
        s.ratio = s.mean_active_context > 0
                      ? s.mean_trajectory / s.mean_active_context
                      : 0.0;
        out.push_back(s);
    }
    return out;
}

std::string render_summary_csv(const std::vector<BandSummary>& bands) {
    std::string out =
        "band,count,mean_trajectory,mean_active_context,ratio\n";
    char buf[160];
    for (const BandSummary& b : bands) {
        std::snprintf(buf, sizeof(buf), "%s,%zu,%.2f,%.2f,%.4f\n",
                      b.band.c_str(), b.count, b.mean_trajectory,
                      b.mean_active_context, b.ratio);
        out += buf;
    }
    return out;
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error)
                    error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w)
        pool.emplace_back(worker);
    for (std::thread& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

}  // namespace recur
