/** @file config.hpp
 *  @brief Flat key=value experiment configuration with a content hash.
 *
 *  Format: one `key = value` per line, `#` starts a comment, keys are
 *  dot-namespaced (`tw.Z`, `tol.stationary_rate`). Lists are comma separated.
 */
#pragma once

#include <map>
#include <string>
#include <vector>

namespace ks {

class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    /// Empty lists are rejected.
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
    /// Tolerances must be positive.
    double tolerance(const std::string& name, double fallback) const;

    /// Sorted `key=value` lines; the hash input.
    std::string canonical() const;
    /// Hex SHA-256 of canonical().
    std::string hash() const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

/// Hex SHA-256 of an arbitrary byte string.
std::string sha256_hex(const std::string& data);

}  // namespace ks
