// Matrix Market matrix files (array and coordinate, real general) and
// one-value-per-line vector files. Numbers are written with shortest
// round-trip decimal formatting, so a save/load cycle is exact.
#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "kminerr/numerics.hpp"

namespace kminerr {

class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
          path_(path),
          line_(line) {}
    const std::string& path() const { return path_; }
    std::size_t line() const { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline double parse_double(const std::string& tok, const std::string& path, std::size_t line) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (first != last && *first == '+') ++first;  // from_chars rejects a leading +
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v))
        throw parse_error(path, line, "cannot parse number '" + tok + "'");
    return v;
}

inline std::size_t parse_index(const std::string& tok, const std::string& path,
                               std::size_t line) {
    std::size_t v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw parse_error(path, line, "cannot parse integer '" + tok + "'");
    return v;
}

inline std::vector<std::string> tokens(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

}  // namespace detail

/// Matrix Market array format, real general, column-major entries.
inline void save_matrix_market(const std::string& path, const Matrix& A) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open '" + path + "' for writing");
    os << "%%MatrixMarket matrix array real general\n";
    os << A.rows() << " " << A.cols() << "\n";
    for (std::size_t j = 0; j < A.cols(); ++j)
        for (std::size_t i = 0; i < A.rows(); ++i) os << format_double(A(i, j)) << "\n";
    if (!os) throw io_error("write failure on '" + path + "'");
}

/// Reads array or coordinate Matrix Market files with field real and
/// symmetry general; anything else is rejected with the offending line.
inline Matrix load_matrix_market(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open '" + path + "' for reading");

    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(is, line)) throw parse_error(path, 1, "empty file");
    ++lineno;
    auto banner = detail::tokens(line);
    if (banner.size() < 5 || banner[0] != "%%MatrixMarket" || banner[1] != "matrix")
        throw parse_error(path, lineno, "not a MatrixMarket matrix header");
    const std::string& format = banner[2];
    if (format != "array" && format != "coordinate")
        throw parse_error(path, lineno, "unsupported format '" + format + "'");
    if (banner[3] != "real")
        throw parse_error(path, lineno, "unsupported field '" + banner[3] + "' (need real)");
    if (banner[4] != "general")
        throw parse_error(path, lineno, "unsupported symmetry '" + banner[4] + "' (need general)");

    auto next_data_line = [&]() -> std::vector<std::string> {
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty() || line[0] == '%') continue;
            auto t = detail::tokens(line);
            if (!t.empty()) return t;
        }
        throw parse_error(path, lineno + 1, "unexpected end of file");
    };

    auto dims = next_data_line();
    if (format == "array") {
        if (dims.size() != 2) throw parse_error(path, lineno, "array size line needs 2 values");
        const std::size_t m = detail::parse_index(dims[0], path, lineno);
        const std::size_t n = detail::parse_index(dims[1], path, lineno);
        Matrix A(m, n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < m; ++i) {
                auto t = next_data_line();
                if (t.size() != 1) throw parse_error(path, lineno, "expected one value per line");
                A(i, j) = detail::parse_double(t[0], path, lineno);
            }
        return A;
    }

    if (dims.size() != 3) throw parse_error(path, lineno, "coordinate size line needs 3 values");
    const std::size_t m = detail::parse_index(dims[0], path, lineno);
    const std::size_t n = detail::parse_index(dims[1], path, lineno);
    const std::size_t nnz = detail::parse_index(dims[2], path, lineno);
    Matrix A(m, n);
    for (std::size_t e = 0; e < nnz; ++e) {
        auto t = next_data_line();
        if (t.size() != 3) throw parse_error(path, lineno, "coordinate entry needs i j value");
        const std::size_t i = detail::parse_index(t[0], path, lineno);
        const std::size_t j = detail::parse_index(t[1], path, lineno);
        if (i < 1 || i > m || j < 1 || j > n)
            throw parse_error(path, lineno, "index (" + t[0] + "," + t[1] + ") out of bounds for " +
                                                std::to_string(m) + "x" + std::to_string(n));
        A(i - 1, j - 1) += detail::parse_double(t[2], path, lineno);
    }
    return A;
}

inline void save_vector(const std::string& path, const Vector& v) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open '" + path + "' for writing");
    for (double x : v) os << format_double(x) << "\n";
    if (!os) throw io_error("write failure on '" + path + "'");
}

inline Vector load_vector(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open '" + path + "' for reading");
    Vector v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto t = detail::tokens(line);
        if (t.empty()) continue;
        if (t.size() != 1) throw parse_error(path, lineno, "expected one value per line");
        v.push_back(detail::parse_double(t[0], path, lineno));
    }
    return v;
}

}  // namespace kminerr
