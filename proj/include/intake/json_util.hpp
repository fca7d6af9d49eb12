#pragma once
// Small shared helpers around nlohmann::json and file I/O.

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "intake/errors.hpp"

namespace intake {

using Json = nlohmann::json;

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path);
    out << text;
}

inline Json parse_json(const std::string& text, const std::string& context) {
    Json parsed = Json::parse(text, nullptr, false);
    if (parsed.is_discarded())
        fail(ErrorCode::ParseError, "invalid JSON in " + context);
    return parsed;
}

inline Json load_json_file(const std::string& path) {
    return parse_json(read_text_file(path), path);
}

// Fetch a required field, with the enclosing document named for diagnostics.
inline const Json& require_field(const Json& doc, const std::string& key,
                                 const std::string& context) {
    auto it = doc.find(key);
    if (it == doc.end())
        fail(ErrorCode::ParseError, context + ": missing field '" + key + "'");
    return *it;
}

inline double clamp01(double v) {
    if (v < 0.0) return 0.0;
    if (v > 1.0) return 1.0;
    return v;
}

// Whitespace token count; the corpus statistics tokenizer.
inline std::size_t whitespace_tokens(const std::string& text) {
    std::istringstream stream(text);
    std::string word;
    std::size_t n = 0;
    while (stream >> word) ++n;
    return n;
}

inline std::string lowercase(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

inline bool contains_ci(const std::string& haystack, const std::string& needle) {
    return lowercase(haystack).find(lowercase(needle)) != std::string::npos;
}

// FNV-1a over a string; used for config hashes and seed derivation.
inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace intake
