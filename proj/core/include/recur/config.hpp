#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace recur {

// Key-value configuration with the precedence flags > environment > file >
// defaults. Files hold "key = value" lines with '#' comments; the config
// path itself comes from a flag or the RECUR_CONFIG environment variable.
class ConfigMap {
public:
    void set(const std::string& key, const std::string& value) {
        values_[key] = value;
    }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get(const std::string& key,
                    const std::string& fallback = "") const;
    std::uint64_t get_u64(const std::string& key,
                          std::uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;

    // Entries of `other` win.
    void overlay(const ConfigMap& other);

    const std::map<std::string, std::string>& values() const {
        return values_;
    }

private:
    std::map<std::string, std::string> values_;
};

ConfigMap parse_config(const std::string& text);
ConfigMap load_config_file(const std::string& path);

// Environment overrides: RECUR_BACKEND_URL, RECUR_BACKEND_MODEL,
// RECUR_API_KEY_ENV, RECUR_MAX_STEPS, RECUR_MAX_DEPTH,
// RECUR_MAX_LOCAL_SPACE, RECUR_BENCH_WORKERS.
ConfigMap env_config();

// File (if any) overlaid with environment values. `path_flag` beats
// RECUR_CONFIG; an empty optional with no env var gives an empty map.
ConfigMap load_config(const std::optional<std::string>& path_flag);

}  // namespace recur
