#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "recur/runtime.hpp"

namespace recur {

// The context template every request is built from. Byte-exact: callers
// golden-test against it.
std::string build_prompt(const std::string& root_problem,
                         const std::string& current_task);

struct BackendConfig {
    std::string base_url;  // origin, optionally with a path prefix
    std::string model;
    std::string api_key_env = "OPENAI_API_KEY";
    int timeout_ms = 30'000;
    int max_tokens = 1024;
    std::vector<std::string> stop = {"</call>", "</return>"};
    int retry_count = 2;       // retries after the first attempt
    int retry_backoff_ms = 50;
    double requests_per_second = 0.0;  // 0 disables rate limiting

    void validate() const;  // stop must cover both closing markers
};

enum class BackendErrorKind {
    Config,
    Auth,
    Timeout,
    Http,
    MalformedResponse,
    RetriesExhausted,
};
const char* to_string(BackendErrorKind k);

struct BackendError : std::runtime_error {
    BackendErrorKind kind;
    int http_status;

    BackendError(BackendErrorKind k, const std::string& msg, int status = 0)
        : std::runtime_error(msg), kind(k), http_status(status) {}
};

// OpenAI-compatible chat-completions client. Temperature is pinned to 0; the
// continuation is truncated at the first stop sequence with the sequence
// re-appended so suffix classification still sees the closing marker.
// Transient failures (connect errors, timeouts, 5xx) are retried with linear
// backoff; auth and other 4xx failures are not. Safe for concurrent calls;
// the rate limiter is shared across them.
class Backend {
public:
    explicit Backend(BackendConfig cfg);
    ~Backend();
    Backend(const Backend&) = delete;
    Backend& operator=(const Backend&) = delete;

    std::string complete(const std::string& prompt);

    const BackendConfig& config() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Truncation helper, exposed for tests: cut at the first occurrence of any
// stop sequence and re-append the one that fired.
std::string truncate_at_stop(const std::string& text,
                             const std::vector<std::string>& stop);

// Adapts the backend to the runtime's generator interface. The view is split
// at the first newline into the current task and previously emitted content;
// only the active frame ever reaches the endpoint.
Generator llm_generator(std::shared_ptr<Backend> backend,
                        std::string root_problem);

}  // namespace recur
