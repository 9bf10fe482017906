#pragma once

#include <gausscomb/gaussian.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>

namespace gausscomb {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, end);
}

inline double parse_double(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) throw std::invalid_argument("not a number: '" + text + "'");
    return v;
}

// Text format:
//   n_modes=<n> labels=<l1,l2,...>
//   2n rows of 2n space-separated values
inline void write_covariance(std::ostream& out, const CovarianceMatrix& sigma) {
    out << "n_modes=" << sigma.mode_count() << " labels=" << sigma.modes().to_string() << '\n';
    const Matrix& m = sigma.matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

inline std::string covariance_to_string(const CovarianceMatrix& sigma) {
    std::ostringstream os;
    write_covariance(os, sigma);
    return os.str();
}

inline CovarianceMatrix read_covariance(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::invalid_argument("covariance file: missing header line");
    std::istringstream hs(header);
    std::string n_field, l_field;
    hs >> n_field >> l_field;
    if (n_field.rfind("n_modes=", 0) != 0 || l_field.rfind("labels=", 0) != 0)
        throw std::invalid_argument("covariance file: header must read 'n_modes=<n> labels=<list>'");

    const long n = std::stol(n_field.substr(8));
    if (n <= 0) throw std::invalid_argument("covariance file: n_modes must be positive");
    std::vector<ModeLabel> labels;
    std::istringstream ls(l_field.substr(7));
    for (std::string tok; std::getline(ls, tok, ',');) labels.push_back(parse_mode_label(tok));
    if (static_cast<long>(labels.size()) != n)
        throw std::invalid_argument("covariance file: label count does not match n_modes");

    const Eigen::Index d = 2 * n;
    Matrix m(d, d);
    std::string line;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (!std::getline(in, line))
            throw std::invalid_argument("covariance file: expected " + std::to_string(d) + " rows");
        std::istringstream rs(line);
        std::string tok;
        Eigen::Index j = 0;
        while (rs >> tok) {
            if (j >= d) throw std::invalid_argument("covariance file: row " + std::to_string(i + 1) + " too long");
            m(i, j++) = parse_double(tok);
        }
        if (j != d) throw std::invalid_argument("covariance file: row " + std::to_string(i + 1) + " too short");
    }
    return {std::move(m), ModeSet(std::move(labels))};
}

inline CovarianceMatrix covariance_from_string(const std::string& text) {
    std::istringstream is(text);
    return read_covariance(is);
}

inline void save_covariance(const std::string& path, const CovarianceMatrix& sigma) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_covariance(out, sigma);
}

inline CovarianceMatrix load_covariance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_covariance(in);
}

}  // namespace gausscomb
