#pragma once

// Locale-independent number formatting, CSV assembly and atomic file writes.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace lrerm {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

inline std::string format_bool(bool b) { return b ? "true" : "false"; }

inline std::string cell(double v) { return format_double(v); }
inline std::string cell(bool v) { return format_bool(v); }
inline std::string cell(std::uint64_t v) { return std::to_string(v); }
inline std::string cell(std::string v) { return v; }

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : columns_(header.size()) { add_row(header); }

    void add_row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) throw std::logic_error("CsvTable: row width does not match header");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text_ += ',';
            text_ += cells[i];
        }
        text_ += '\n';
    }

    [[nodiscard]] const std::string& str() const noexcept { return text_; }

private:
    std::size_t columns_;
    std::string text_;
};

/// Writes content to path via a sibling temporary file and rename; creates missing parent directories.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace lrerm
