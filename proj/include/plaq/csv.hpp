#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

// Minimal CSV emission: UTF-8, comma separators, '.' decimal independent of
// locale, scientific notation for probabilities below 1e-3.

namespace plaq::csv {

inline std::string format_double(double v, int precision = 12) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
    return std::string(buf, res.ptr);
}

inline std::string format_probability(double p, int precision = 8) {
    if (std::isnan(p)) return "nan";
    if (p != 0.0 && std::abs(p) < 1e-3) {
        char buf[64];
        const auto res =
            std::to_chars(buf, buf + sizeof(buf), p, std::chars_format::scientific, precision);
        return std::string(buf, res.ptr);
    }
    return format_double(p, precision);
}

class Writer {
  public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void header(const std::vector<std::string>& names) {
        write_row(names);
    }

    void row(const std::vector<std::string>& fields) { write_row(fields); }

  private:
    void write_row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }
    std::ostream& out_;
};

}  // namespace plaq::csv
