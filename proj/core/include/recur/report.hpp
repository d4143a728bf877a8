#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace recur {

struct BenchRow {
    std::string id;
    std::string band;
    std::string verdict;
    std::string oracle;
    std::uint64_t trajectory_tokens = 0;
    std::uint64_t max_active_context = 0;
    std::uint64_t max_depth = 0;
    std::uint64_t steps = 0;
    double wall_ms = 0.0;

    bool operator==(const BenchRow&) const = default;
};

struct BandSummary {
    std::string band;
    std::size_t count = 0;
    double mean_trajectory = 0.0;
    double mean_active_context = 0.0;
    double ratio = 0.0;  // mean_trajectory / mean_active_context
};

// Stable column order:
// id,band,verdict,oracle,trajectory,max_active_context,max_depth,steps,wall_ms
std::string render_rows_csv(const std::vector<BenchRow>& rows);
std::vector<BenchRow> parse_rows_csv(const std::string& text);

// Bands ordered easy, medium, hard, then others by first appearance.
std::vector<BandSummary> summarize_bands(const std::vector<BenchRow>& rows);
std::string render_summary_csv(const std::vector<BandSummary>& bands);

// Minimal CSV reader (quoted fields supported); the parser the CSV outputs
// round-trip through.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Runs fn(0..n-1) on a fixed-size worker pool; exceptions rethrow on the
// caller after all workers join.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace recur
