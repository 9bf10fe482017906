#pragma once

#include <gausscomb/covariance_io.hpp>
#include <gausscomb/gaussian.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gausscomb {

inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J / K

/// Digitised quadrature samples. `samples` is N × 2n with columns
/// (I, Q) interleaved per mode in ModeSet order; per-mode vectors are indexed
/// by mode position.
struct QuadratureRecord {
    ModeSet modes;
    Matrix samples;
    std::vector<double> frequencies_hz;
    std::vector<double> gains;
    double bandwidth_hz = 0.0;
    double z0_ohm = 50.0;
    double temperature_k = 0.0;
};

struct RawCovariance {
    Matrix sigma;
    ModeSet modes;
    std::vector<std::string> warnings;
    std::size_t sample_count = 0;
};

inline void validate_record(const QuadratureRecord& rec) {
    const auto n = rec.modes.size();
    if (static_cast<std::size_t>(rec.samples.cols()) != 2 * n)
        throw std::invalid_argument("sample matrix must have 2 columns (I, Q) per mode");
    if (rec.samples.rows() < 2) throw std::invalid_argument("need at least 2 samples per channel");
    if (rec.frequencies_hz.size() != n || rec.gains.size() != n)
        throw std::invalid_argument("frequencies and gains must be given for every mode");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(rec.gains[i] > 0.0)) throw std::invalid_argument("gain of mode " + to_string(rec.modes[i]) + " must be positive");
        if (!(rec.frequencies_hz[i] > 0.0))
            throw std::invalid_argument("frequency of mode " + to_string(rec.modes[i]) + " must be positive");
    }
    if (!(rec.bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    if (!(rec.z0_ohm > 0.0)) throw std::invalid_argument("impedance must be positive");
}

/// (σ)_mn = 2⟨Δr_m Δr_n⟩ / (√(G_m G_n f_m f_n) Z₀ h B), sample covariance with
/// the N − 1 normalisation, exactly symmetric.
inline RawCovariance covariance_from_samples(const QuadratureRecord& rec) {
    validate_record(rec);
    const Eigen::Index d = rec.samples.cols();
    const auto n_samples = rec.samples.rows();

    const Eigen::RowVectorXd mean = rec.samples.colwise().mean();
    const Matrix centered = rec.samples.rowwise() - mean;
    Matrix cov = (centered.transpose() * centered) / static_cast<double>(n_samples - 1);

    Vector scale(d);
    for (Eigen::Index c = 0; c < d; ++c) {
        const auto mode = static_cast<std::size_t>(c / 2);
        scale(c) = std::sqrt(rec.gains[mode] * rec.frequencies_hz[mode]);
    }
    RawCovariance out;
    out.modes = rec.modes;
    out.sample_count = static_cast<std::size_t>(n_samples);
    const double norm = rec.z0_ohm * kPlanck * rec.bandwidth_hz;
    out.sigma = Matrix(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i; j < d; ++j) {
            const double v = 2.0 * cov(i, j) / (scale(i) * scale(j) * norm);
            out.sigma(i, j) = v;
            out.sigma(j, i) = v;
        }
    for (Eigen::Index c = 0; c < d; ++c)
        if (cov(c, c) == 0.0)
            out.warnings.push_back("zero variance in channel " + std::string(c % 2 ? "Q_" : "I_") +
                                   to_string(rec.modes[static_cast<std::size_t>(c / 2)]));
    return out;
}

/// coth(h f / 2 k_B T); T = 0 gives the vacuum value 1.
inline double thermal_factor(double frequency_hz, double temperature_k) {
    if (!std::isfinite(temperature_k) || temperature_k < 0.0)
        throw std::domain_error("temperature must be finite and nonnegative");
    if (!(frequency_hz > 0.0)) throw std::invalid_argument("frequency must be positive");
    if (temperature_k == 0.0) return 1.0;
    const double x = kPlanck * frequency_hz / (2.0 * kBoltzmann * temperature_k);
    if (x > 350.0) return 1.0;
    const double v = 1.0 / std::tanh(x);
    if (!std::isfinite(v)) throw std::domain_error("thermal factor diverges");
    return v;
}

struct BackgroundResult {
    CovarianceMatrix sigma;
    PhysicalityReport physicality;
    std::vector<std::string> warnings;
};

/// σ = (σ_on − σ_off) + diag(coth(h f_n / 2 k_B T)). Unphysical results are
/// returned with a warning.
inline BackgroundResult background_subtract(const Matrix& sigma_on, const Matrix& sigma_off, const ModeSet& modes,
                                            const std::vector<double>& frequencies_hz, double temperature_k,
                                            double physical_tol = kDefaultPhysicalTolerance) {
    if (sigma_on.rows() != sigma_off.rows() || sigma_on.cols() != sigma_off.cols())
        throw std::invalid_argument("pump-on and pump-off matrices differ in size");
    if (static_cast<std::size_t>(sigma_on.rows()) != modes.dimension() || frequencies_hz.size() != modes.size())
        throw std::invalid_argument("mode set / frequency list does not match the matrices");
    Matrix sigma = sigma_on - sigma_off;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const double c = thermal_factor(frequencies_hz[k], temperature_k);
        const auto i = static_cast<Eigen::Index>(2 * k);
        sigma(i, i) += c;
        sigma(i + 1, i + 1) += c;
    }
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    BackgroundResult r{CovarianceMatrix(std::move(sigma), modes), {}, {}};
    r.physicality = check_physical(r.sigma.matrix(), physical_tol);
    if (!r.physicality.physical)
        r.warnings.push_back("background-subtracted state violates the uncertainty relation (min nu = " +
                             std::to_string(r.physicality.min_symplectic_eigenvalue) + ")");
    return r;
}

/// Linear map from instrument amplitude to coupling rate, pinned so that the
/// oscillation onset a_crit corresponds to α = κ/2.
struct CalibrationCurve {
    double critical_amplitude = 0.3175;
    double kappa = 1.0;

    double alpha(double a) const { return 0.5 * kappa * a / critical_amplitude; }
};

inline double calibrate_pump_amplitude(double a, const CalibrationCurve& cal) {
    if (!(cal.critical_amplitude > 0.0)) throw std::invalid_argument("critical amplitude must be positive");
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("instrument amplitude must be nonnegative");
    return cal.alpha(a);
}

// ---- files ---------------------------------------------------------------

/// key = value lines, '#' comments.
inline std::map<std::string, std::string> read_sidecar(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("metadata line " + std::to_string(lineno) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

struct SampleTable {
    ModeSet modes;
    Matrix samples;
};

/// CSV with header I_<label>,Q_<label>,... and one sample per row.
inline SampleTable read_quadrature_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::invalid_argument("quadrature csv: empty file");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    std::vector<std::string> cols;
    {
        std::istringstream hs(header);
        for (std::string c; std::getline(hs, c, ',');) cols.push_back(c);
    }
    if (cols.empty() || cols.size() % 2 != 0) throw std::invalid_argument("quadrature csv: need I/Q column pairs");
    std::vector<ModeLabel> labels;
    for (std::size_t c = 0; c < cols.size(); c += 2) {
        if (cols[c].rfind("I_", 0) != 0 || cols[c + 1].rfind("Q_", 0) != 0 || cols[c].substr(2) != cols[c + 1].substr(2))
            throw std::invalid_argument("quadrature csv: columns must be I_<label>,Q_<label> pairs");
        labels.push_back(parse_mode_label(cols[c].substr(2)));
    }

    std::vector<double> values;
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::size_t count = 0;
        for (std::string tok; std::getline(ls, tok, ',');) {
            values.push_back(parse_double(tok));
            ++count;
        }
        if (count != cols.size())
            throw std::invalid_argument("quadrature csv: row " + std::to_string(rows + 2) + " has " +
                                        std::to_string(count) + " values, expected " + std::to_string(cols.size()));
        ++rows;
    }
    SampleTable t{ModeSet(std::move(labels)), Matrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols.size()))};
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            t.samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * cols.size() + c];
    return t;
}

/// Combines a sample table with metadata keys: bandwidth_hz, z0_ohm,
/// temperature_k, gain.<label>, freq_hz.<label>.
inline QuadratureRecord make_record(SampleTable table, const std::map<std::string, std::string>& meta) {
    auto need = [&](const std::string& key) {
        auto it = meta.find(key);
        if (it == meta.end()) throw std::invalid_argument("metadata is missing '" + key + "'");
        return parse_double(it->second);
    };
    QuadratureRecord rec;
    rec.modes = table.modes;
    rec.samples = std::move(table.samples);
    rec.bandwidth_hz = need("bandwidth_hz");
    rec.z0_ohm = meta.count("z0_ohm") ? need("z0_ohm") : 50.0;
    rec.temperature_k = need("temperature_k");
    for (const auto& m : rec.modes) {
        rec.gains.push_back(need("gain." + to_string(m)));
        rec.frequencies_hz.push_back(need("freq_hz." + to_string(m)));
    }
    return rec;
}

inline QuadratureRecord load_record(const std::string& csv_path, const std::map<std::string, std::string>& meta) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open " + csv_path);
    return make_record(read_quadrature_csv(in), meta);
}

inline std::map<std::string, std::string> load_sidecar(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_sidecar(in);
}

}  // namespace gausscomb
