#include "recur/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace recur {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string ConfigMap::get(const std::string& key,
                           const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::uint64_t ConfigMap::get_u64(const std::string& key,
                                 std::uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key +
                                    "' is not an integer: " + it->second);
    }
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key +
                                    "' is not a number: " + it->second);
    }
}

void ConfigMap::overlay(const ConfigMap& other) {
    for (const auto& [k, v] : other.values_)
        values_[k] = v;
}

ConfigMap parse_config(const std::string& text) {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos)
            line.resize(pos);
        std::string t = trim(line);
        if (t.empty())
            continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " +
                                        std::to_string(lineno) +
                                        ": expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " +
                                        std::to_string(lineno) +
                                        ": empty key");
        cfg.set(key, value);
    }
    return cfg;
}

ConfigMap load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

ConfigMap env_config() {
    static const std::pair<const char*, const char*> kVars[] = {
        {"RECUR_BACKEND_URL", "backend.base_url"},
        {"RECUR_BACKEND_MODEL", "backend.model"},
        {"RECUR_API_KEY_ENV", "backend.api_key_env"},
        {"RECUR_MAX_STEPS", "limits.max_steps"},
        {"RECUR_MAX_DEPTH", "limits.max_depth"},
        {"RECUR_MAX_LOCAL_SPACE", "limits.max_local_space"},
        {"RECUR_BENCH_WORKERS", "bench.workers"},
    };
    ConfigMap cfg;
    for (const auto& [env, key] : kVars) {
        if (const char* v = std::getenv(env))
            cfg.set(key, v);
    }
    return cfg;
}

ConfigMap load_config(const std::optional<std::string>& path_flag) {
    ConfigMap cfg;
    std::string path;
    if (path_flag) {
        path = *path_flag;
    } else if (const char* env = std::getenv("RECUR_CONFIG")) {
        path = env;
    }
    if (!path.empty())
        cfg = load_config_file(path);
    cfg.overlay(env_config());
    return cfg;
}

}  // namespace recur
