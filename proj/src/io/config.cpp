#include "rlscape/io/config.hpp"

#include <cctype>
#include <climits>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rlscape/io/format.hpp"
#include "rlscape/rng.hpp"

namespace rlscape {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view key) {
    if (key.empty() || key.front() == '.' || key.back() == '.') return false;
    for (const char c : key) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
                        c == '.';
        if (!ok) return false;
    }
    return true;
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
    throw std::runtime_error("config line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

Config Config::parse_text(const std::string& text) {
    Config cfg;
    std::string section;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#' || stripped.front() == ';') continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']') parse_error(line_no, "unterminated section header");
            const std::string_view name = trim(stripped.substr(1, stripped.size() - 2));
            if (!valid_key(name)) parse_error(line_no, "invalid section name");
            section = std::string(name);
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string_view::npos) parse_error(line_no, "expected 'key = value'");
        const std::string_view key = trim(stripped.substr(0, eq));
        const std::string_view value = trim(stripped.substr(eq + 1));
        if (!valid_key(key)) parse_error(line_no, "invalid key '" + std::string(key) + "'");
        const std::string canonical =
            section.empty() ? std::string(key) : section + "." + std::string(key);
        if (cfg.values_.count(canonical))
            parse_error(line_no, "duplicate key '" + canonical + "'");
        cfg.values_.emplace(canonical, std::string(value));
    }
    return cfg;
}

Config Config::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

void Config::set(const std::string& key, std::string value) {
    if (!valid_key(key)) throw std::invalid_argument("Config::set: invalid key '" + key + "'");
    values_[key] = std::move(value);
}

void Config::set_double(const std::string& key, double value) { set(key, format_double(value)); }
void Config::set_i64(const std::string& key, std::int64_t value) {
    set(key, std::to_string(value));
}
void Config::set_u64(const std::string& key, std::uint64_t value) {
    set(key, std::to_string(value));
}
void Config::set_bool(const std::string& key, bool value) { set(key, value ? "true" : "false"); }

std::string Config::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("config: missing required key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

namespace {

template <typename T, typename Parse>
T get_parsed(const std::map<std::string, std::string>& values, const std::string& key,
             Parse parse) {
    const auto it = values.find(key);
    if (it == values.end()) throw std::runtime_error("config: missing required key '" + key + "'");
    try {
        return parse(it->second);
    } catch (const std::exception& e) {
        throw std::runtime_error("config key '" + key + "': " + e.what());
    }
}

template <typename T, typename Parse>
T get_parsed_or(const std::map<std::string, std::string>& values, const std::string& key,
                T fallback, Parse parse) {
    const auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
        return parse(it->second);
    } catch (const std::exception& e) {
        throw std::runtime_error("config key '" + key + "': " + e.what());
    }
}

}  // namespace

double Config::get_double(const std::string& key) const {
    return get_parsed<double>(values_, key, [](const std::string& s) { return parse_double(s); });
}
double Config::get_double(const std::string& key, double fallback) const {
    return get_parsed_or<double>(values_, key, fallback,
                                 [](const std::string& s) { return parse_double(s); });
}
std::int64_t Config::get_i64(const std::string& key) const {
    return get_parsed<std::int64_t>(values_, key,
                                    [](const std::string& s) { return parse_i64(s); });
}
std::int64_t Config::get_i64(const std::string& key, std::int64_t fallback) const {
    return get_parsed_or<std::int64_t>(values_, key, fallback,
                                       [](const std::string& s) { return parse_i64(s); });
}
std::uint64_t Config::get_u64(const std::string& key) const {
    return get_parsed<std::uint64_t>(values_, key,
                                     [](const std::string& s) { return parse_u64(s); });
}
std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    return get_parsed_or<std::uint64_t>(values_, key, fallback,
                                        [](const std::string& s) { return parse_u64(s); });
}

int Config::get_int(const std::string& key, int fallback) const {
    const std::int64_t wide = get_i64(key, fallback);
    if (wide < INT_MIN || wide > INT_MAX)
        throw std::runtime_error("config key '" + key + "': value out of int range");
    return static_cast<int>(wide);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::runtime_error("config key '" + key + "': expected true/false/1/0, got '" + v + "'");
}

std::string Config::canonical_text() const {
    // Bare keys first, then sections in sorted order. std::map already
    // iterates in sorted key order; a dotted key's section is its prefix, so
    // sorted canonical keys group by section automatically, except that bare
    // keys can interleave ("a", "b.c", "d" sorts with "d" after the section).
    // Emit bare keys in a first pass to keep every section contiguous.
    std::ostringstream out;
    for (const auto& [key, value] : values_) {
        if (key.find('.') == std::string::npos) out << key << " = " << value << "\n";
    }
    std::string current_section;
    for (const auto& [key, value] : values_) {
        const std::size_t dot = key.find('.');
        if (dot == std::string::npos) continue;
        const std::string section = key.substr(0, dot);
        if (section != current_section) {
            out << "[" << section << "]\n";
            current_section = section;
        }
        out << key.substr(dot + 1) << " = " << value << "\n";
    }
    return out.str();
}

std::uint64_t Config::hash() const {
    const std::string text = canonical_text();
    return fnv1a64(text);
}

void Config::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << canonical_text();
    if (!out) throw std::runtime_error("failed writing config file: " + path);
}

}  // namespace rlscape
