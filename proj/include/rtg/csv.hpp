// csv.hpp — Deterministic CSV output.
//
// Every file gets a header row; floating-point cells use 17 significant
// digits so a reader recovers the exact double.
#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>

#include "rtg/errors.hpp"

namespace rtg {

inline std::string csv_num(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

inline std::string csv_int(std::int64_t v) { return std::to_string(v); }

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
        if (!out_) throw error("cannot open '" + path.string() + "' for writing");
        out_ << header << '\n';
    }

    void row(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const auto& cell : cells) {
            if (!first) out_ << ',';
            out_ << cell;
            first = false;
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

} // namespace rtg
