#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace rlscape {

// Flat key-value configuration with [section] grouping.
//
// Text format, one entry per line:
//     # comment (';' also starts a comment)
//     top_level_key = value
//     [train]
//     total_steps = 200000
//
// The canonical key of an entry is "section.key" ("total_steps" above
// becomes "train.total_steps"); keys before any section header stay bare.
// canonical_text() emits entries sorted by canonical key, so equal
// configurations serialize to equal bytes and hash() is stable across
// insertion orders.
class Config {
public:
    Config() = default;

    // Throws std::runtime_error with a line number on malformed input or
    // duplicate keys.
    static Config parse_text(const std::string& text);
    static Config load_file(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, std::string value);
    void set_double(const std::string& key, double value);
    void set_i64(const std::string& key, std::int64_t value);
    void set_u64(const std::string& key, std::uint64_t value);
    void set_bool(const std::string& key, bool value);

    // Single-argument getters throw std::runtime_error when the key is
    // missing; two-argument getters return the fallback instead. All throw
    // on unparseable values, naming the key.
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_i64(const std::string& key) const;
    std::int64_t get_i64(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    std::string canonical_text() const;
    std::uint64_t hash() const;  // FNV-1a 64 over canonical_text()
    void save_file(const std::string& path) const;

    const std::map<std::string, std::string>& entries() const { return values_; }
    bool operator==(const Config&) const = default;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace rlscape
