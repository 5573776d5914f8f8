#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dynlogit/error.hpp"

namespace dynlogit::detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

/// 1-based line number containing byte `offset` (nlohmann reports 1-based bytes).
inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
    std::size_t line = 1;
    std::size_t end = std::min(offset > 0 ? offset - 1 : 0, text.size());
    for (std::size_t k = 0; k < end; ++k)
        if (text[k] == '\n') ++line;
    return line;
}

/// Splits on commas, tabs or spaces; trims; drops a trailing '\r'.
inline std::vector<std::string> split_fields(const std::string& raw) {
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> out;
    const bool has_comma = line.find(',') != std::string::npos;
    std::string cur;
    auto flush = [&](bool keep_empty) {
        auto b = cur.find_first_not_of(" \t");
        auto e = cur.find_last_not_of(" \t");
        std::string f = b == std::string::npos ? std::string() : cur.substr(b, e - b + 1);
        if (keep_empty || !f.empty()) out.push_back(std::move(f));
        cur.clear();
    };
    for (char c : line) {
        if (has_comma ? c == ',' : (c == ' ' || c == '\t')) {
            flush(has_comma);
        } else {
            cur += c;
        }
    }
    flush(has_comma && !out.empty());
    if (out.size() == 1 && out[0].empty()) out.clear();
    return out;
}

}  // namespace dynlogit::detail
