#include "recur/backend.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace recur {

std::string build_prompt(const std::string& root_problem,
                         const std::string& current_task) {
    return "[Instructions]\n"
           "Solve problems recursively. Use <call> </call> to decompose the "
           "problem and <return> </return> to return the answer.\n"
           "\n"
           "[Root Problem]\n" +
           root_problem +
           "\n"
           "\n"
           "[Current Task]\n" +
           current_task;
}

const char* to_string(BackendErrorKind k) {
    switch (k) {
    case BackendErrorKind::Config: return "config";
    case BackendErrorKind::Auth: return "auth";
    case BackendErrorKind::Timeout: return "timeout";
    case BackendErrorKind::Http: return "http";
    case BackendErrorKind::MalformedResponse: return "malformed_response";
    case BackendErrorKind::RetriesExhausted: return "retries_exhausted";
    }
    return "?";
}

void BackendConfig::validate() const {
    if (base_url.empty())
        throw BackendError(BackendErrorKind::Config, "base_url is empty");
    if (timeout_ms <= 0 || max_tokens <= 0 || retry_count < 0 ||
        retry_backoff_ms < 0)
        throw BackendError(BackendErrorKind::Config,
                           "timeouts, token limits and retries must be "
                           "non-negative (timeout/max_tokens positive)");
    auto has = [&](const char* s) {
        return std::find(stop.begin(), stop.end(), s) != stop.end();
    };
    if (!has("</call>") || !has("</return>"))
        throw BackendError(BackendErrorKind::Config,
                           "stop sequences must include </call> and "
                           "</return>");
}

std::string truncate_at_stop(const std::string& text,
                             const std::vector<std::string>& stop) {
    std::size_t best = std::string::npos;
    const std::string* fired = nullptr;
    for (const std::string& s : stop) {
        if (s.empty())
            continue;
        std::size_t pos = text.find(s);
        if (pos != std::string::npos && (pos < best || !fired)) {
            best = pos;
            fired = &s;
        }
    }
    if (!fired)
        return text;
    return text.substr(0, best) + *fired;
}

struct Backend::Impl {
    BackendConfig cfg;
    std::string origin;
    std::string prefix;

    // shared token bucket
    std::mutex mu;
    double bucket = 1.0;
    std::chrono::steady_clock::time_point last =
        std::chrono::steady_clock::now();

    void acquire() {
        if (cfg.requests_per_second <= 0)
            return;
        for (;;) {
            std::unique_lock<std::mutex> lock(mu);
            auto now = std::chrono::steady_clock::now();
            double elapsed =
                std::chrono::duration<double>(now - last).count();
            last = now;
            bucket = std::min(cfg.requests_per_second,
                              bucket + elapsed * cfg.requests_per_second);
            if (bucket >= 1.0) {
                bucket -= 1.0;
                return;
            }
            double wait = (1.0 - bucket) / cfg.requests_per_second;
            lock.unlock();
            std::this_thread::sleep_for(
                std::chrono::duration<double>(wait));
        }
    }
};

Backend::Backend(BackendConfig cfg) : impl_(std::make_unique<Impl>()) {
    cfg.validate();
    std::string url = cfg.base_url;
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos
                                 ? 0
                                 : scheme_end + 3;
    auto slash = url.find('/', host_start);
    if (slash == std::string::npos) {
        impl_->origin = url;
    } else {
        impl_->origin = url.substr(0, slash);
        impl_->prefix = url.substr(slash);
        while (!impl_->prefix.empty() && impl_->prefix.back() == '/')
            impl_->prefix.pop_back();
    }
    impl_->cfg = std::move(cfg);
}

Backend::~Backend() = default;

const BackendConfig& Backend::config() const { return impl_->cfg; }

std::string Backend::complete(const std::string& prompt) {
    const BackendConfig& cfg = impl_->cfg;

    nlohmann::json body;
    body["model"] = cfg.model;
    body["messages"] =
        nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = 0;
    body["max_tokens"] = cfg.max_tokens;
    body["stop"] = cfg.stop;
    std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg.api_key_env.c_str()))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= cfg.retry_count; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(
                cfg.retry_backoff_ms * attempt));
        impl_->acquire();

        httplib::Client client(impl_->origin);
        client.set_connection_timeout(0, cfg.timeout_ms * 1000LL);
        client.set_read_timeout(cfg.timeout_ms / 1000,
                                (cfg.timeout_ms % 1000) * 1000LL);

        auto res = client.Post(impl_->prefix + "/chat/completions", headers,
                               payload, "application/json");
        if (!res) {
            bool timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                             res.error() == httplib::Error::Read;
            last_error = std::string("transport: ") +
                         httplib::to_string(res.error());
            if (attempt == cfg.retry_count)
                throw BackendError(timed_out
                                       ? BackendErrorKind::Timeout
                                       : BackendErrorKind::RetriesExhausted,
                                   last_error);
            continue;  // transient
        }
        if (res->status == 401 || res->status == 403)
            throw BackendError(BackendErrorKind::Auth,
                               "authentication failed (HTTP " +
                                   std::to_string(res->status) + ")",
                               res->status);
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            if (attempt == cfg.retry_count)
                throw BackendError(BackendErrorKind::RetriesExhausted,
                                   "retries exhausted after " + last_error,
                                   res->status);
            continue;
        }
        if (res->status != 200)
            throw BackendError(BackendErrorKind::Http,
                               "unexpected HTTP " +
                                   std::to_string(res->status),
                               res->status);
        try {
            nlohmann::json j = nlohmann::json::parse(res->body);
            std::string content = j.at("choices")
                                      .at(0)
                                      .at("message")
                                      .at("content")
                                      .get<std::string>();
            return truncate_at_stop(content, cfg.stop);
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(BackendErrorKind::MalformedResponse,
                               std::string("cannot parse response: ") +
                                   e.what(),
                               res->status);
        }
    }
    throw BackendError(BackendErrorKind::RetriesExhausted, last_error);
}

Generator llm_generator(std::shared_ptr<Backend> backend,
                        std::string root_problem) {
    return [backend, root = std::move(root_problem)](
               const TokenSeq& view) -> TokenSeq {
        auto nl = std::find(view.begin(), view.end(), tok::Newline);
        TokenSeq task(view.begin(), nl);
        TokenSeq rest(nl == view.end() ? view.end() : nl + 1, view.end());
        std::string prompt = build_prompt(root, render(task));
        if (!rest.empty())
            prompt += "\n\n" + render(rest);
        try {
            return tokenize(backend->complete(prompt));
        } catch (const BackendError& e) {
            throw GeneratorError(std::string("backend ") +
                                 to_string(e.kind) + ": " + e.what());
        }
    };
}

}  // namespace recur
