#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rlscape {

// Shortest decimal text that parses back to the exact same binary64 value.
inline std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    double out = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::invalid_argument("parse_double: invalid real '" + std::string(text) + "'");
    return out;
}

inline std::int64_t parse_i64(std::string_view text) {
    std::int64_t out = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::invalid_argument("parse_i64: invalid integer '" + std::string(text) + "'");
    return out;
}

inline std::uint64_t parse_u64(std::string_view text) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::invalid_argument("parse_u64: invalid unsigned integer '" + std::string(text) +
                                    "'");
    return out;
}

}  // namespace rlscape
