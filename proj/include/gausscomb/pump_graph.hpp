#pragma once

#include <gausscomb/gaussian.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace gausscomb {

using Complex = std::complex<double>;

/// Largest half-pump position on the symmetric grid and the matching mode universe.
inline constexpr int kMaxPumpHalfPosition = 14;
inline constexpr int kMaxSymmetricPumps = 15;
inline constexpr int kUniverseMaxLabel = 43;

/// One pump tone. `half_position` is the half-pump frequency in units of the
/// mode spacing; `amplitude` is |α| in units of κ.
struct PumpTone {
    double half_position = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;

    Complex coupling() const { return std::polar(amplitude, phase); }
};

/// The 44-mode universe ±1, ..., ±43.
inline ModeSet universe_mode_set() { return ModeSet::symmetric(kUniverseMaxLabel); }

/// Pump order P0, P2, P-2, P4, P-4, ... for the first `n` symmetric pumps.
inline std::vector<int> standard_pump_positions(int n) {
    if (n < 0 || n > kMaxSymmetricPumps)
        throw std::invalid_argument("pump count must be in [0, " + std::to_string(kMaxSymmetricPumps) + "]");
    std::vector<int> pos;
    for (int i = 0; i < n; ++i) pos.push_back(i == 0 ? 0 : ((i + 1) / 2) * 2 * (i % 2 == 1 ? 1 : -1));
    return pos;
}

/// Mode pairs (P − (2n+1), P + (2n+1)) squeezed by a pump at half position P,
/// restricted to pairs with both members in `modes`.
inline std::vector<std::pair<int, int>> enumerate_tms_pairs(int pump_half_position, const ModeSet& modes) {
    if (pump_half_position % 2 != 0)
        throw std::invalid_argument("pump half position must be even, got " + std::to_string(pump_half_position));
    std::vector<std::pair<int, int>> pairs;
    const int bound = modes.max_abs_frequency();
    for (int offset = 1;; offset += 2) {
        const int lo = pump_half_position - offset;
        const int hi = pump_half_position + offset;
        if (lo < -bound && hi > bound) break;
        if (modes.contains(lo) && modes.contains(hi)) pairs.emplace_back(lo, hi);
    }
    return pairs;
}

struct StandardModeSet {
    ModeSet modes;
    std::size_t direct = 0;  ///< ±1 plus their first-order neighbours
    std::size_t total = 0;   ///< direct modes plus their first-order neighbours
};

inline StandardModeSet standard_mode_set(int n_pumps) {
    if (n_pumps < 1 || n_pumps > kMaxSymmetricPumps)
        throw std::invalid_argument("n_pumps must be in [1, 15]");
    StandardModeSet out{universe_mode_set(), 0, 0};

    std::vector<std::pair<int, int>> edges;
    for (int p : standard_pump_positions(n_pumps))
        for (auto e : enumerate_tms_pairs(p, out.modes)) edges.push_back(e);

    auto expand = [&](const std::set<int>& seed) {
        std::set<int> next = seed;
        for (auto [a, b] : edges) {
            if (seed.count(a)) next.insert(b);
            if (seed.count(b)) next.insert(a);
        }
        return next;
    };
    const auto direct = expand({-1, 1});
    out.direct = direct.size();
    out.total = expand(direct).size();
    return out;
}

/// Complex symmetric (not Hermitian) graph matrix with zero diagonal.
class AdjacencyMatrix {
public:
    AdjacencyMatrix(ComplexMatrix a, ModeSet modes) : a_(std::move(a)), modes_(std::move(modes)) {
        if (a_.rows() != a_.cols() || static_cast<std::size_t>(a_.rows()) != modes_.size())
            throw std::invalid_argument("adjacency matrix dimension does not match mode set");
        if ((a_ - a_.transpose()).norm() > 1e-12 * std::max(1.0, a_.norm()))
            throw std::invalid_argument("adjacency matrix must be complex symmetric");
    }

    const ComplexMatrix& matrix() const noexcept { return a_; }
    const ModeSet& modes() const noexcept { return modes_; }
    std::size_t size() const noexcept { return modes_.size(); }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (Eigen::Index j = 0; j < a_.rows(); ++j)
            for (Eigen::Index k = j + 1; k < a_.cols(); ++k)
                if (a_(j, k) != Complex(0.0, 0.0)) ++n;
        return n;
    }

    std::size_t degree(const ModeLabel& m) const {
        const auto j = static_cast<Eigen::Index>(modes_.position(m));
        std::size_t n = 0;
        for (Eigen::Index k = 0; k < a_.cols(); ++k)
            if (k != j && a_(j, k) != Complex(0.0, 0.0)) ++n;
        return n;
    }

private:
    ComplexMatrix a_;
    ModeSet modes_;
};

inline bool on_symmetric_grid(double half_position) {
    return std::isfinite(half_position) && half_position == std::round(half_position) &&
           static_cast<long>(half_position) % 2 == 0 && std::abs(half_position) <= kMaxPumpHalfPosition;
}

/// A_jk = Σ_p α_p over the TMS pairs of each pump. Pumps are summed in a
/// canonical order so the result does not depend on input order.
inline AdjacencyMatrix build_symmetric_adjacency(std::vector<PumpTone> pumps, const ModeSet& modes) {
    for (const auto& p : pumps) {
        if (!on_symmetric_grid(p.half_position))
            throw std::invalid_argument("pump half position " + std::to_string(p.half_position) +
                                        " is off the symmetric grid (even integers in [-14, 14])");
        if (!std::isfinite(p.amplitude) || p.amplitude < 0.0 || !std::isfinite(p.phase))
            throw std::invalid_argument("pump amplitude must be finite and nonnegative");
    }
    std::sort(pumps.begin(), pumps.end(), [](const PumpTone& a, const PumpTone& b) {
        return std::tie(a.half_position, a.amplitude, a.phase) < std::tie(b.half_position, b.amplitude, b.phase);
    });

    const auto n = static_cast<Eigen::Index>(modes.size());
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (const auto& p : pumps) {
        const Complex alpha = p.coupling();
        for (auto [lo, hi] : enumerate_tms_pairs(static_cast<int>(p.half_position), modes)) {
            const auto j = static_cast<Eigen::Index>(modes.position(lo));
            const auto k = static_cast<Eigen::Index>(modes.position(hi));
            a(j, k) += alpha;
            a(k, j) += alpha;
        }
    }
    return {std::move(a), modes};
}

inline AdjacencyMatrix build_symmetric_adjacency(std::vector<PumpTone> pumps) {
    return build_symmetric_adjacency(std::move(pumps), universe_mode_set());
}

/// Block model: pumps[0], pumps[1] span the 44 system modes; every further pump
/// k couples system mode i to its own idler i@k with amplitude α_k. Idler
/// layers do not couple to each other. Extra-pump positions are not used.
inline AdjacencyMatrix build_asymmetric_adjacency(const std::vector<PumpTone>& pumps) {
    if (pumps.size() < 2) return build_symmetric_adjacency(pumps);

    const ModeSet system = universe_mode_set();
    const AdjacencyMatrix core = build_symmetric_adjacency({pumps[0], pumps[1]}, system);
    const auto block = static_cast<Eigen::Index>(system.size());
    const auto layers = static_cast<Eigen::Index>(pumps.size() - 1);

    std::vector<ModeLabel> labels = system.labels();
    for (std::size_t k = 2; k < pumps.size(); ++k) {
        if (!std::isfinite(pumps[k].amplitude) || pumps[k].amplitude < 0.0)
            throw std::invalid_argument("pump amplitude must be finite and nonnegative");
        for (const auto& m : system) labels.push_back({m.frequency, static_cast<int>(k + 1)});
    }

    ComplexMatrix a = ComplexMatrix::Zero(block * layers, block * layers);
    a.topLeftCorner(block, block) = core.matrix();
    for (Eigen::Index layer = 1; layer < layers; ++layer) {
        const Complex alpha = pumps[static_cast<std::size_t>(layer + 1)].coupling();
        for (Eigen::Index i = 0; i < block; ++i) {
            a(i, layer * block + i) = alpha;
            a(layer * block + i, i) = alpha;
        }
    }
    return {std::move(a), ModeSet(std::move(labels))};
}

/// Real symmetric quadrature-basis matrix H with Ĥ = ½ rᵀ H r.
struct HamiltonianMatrix {
    Matrix quad;
    ModeSet modes;
};

/// Each edge α = |α|e^{iφ} between j and k contributes
/// |α| [cos φ (x_j p_k + p_j x_k) − sin φ (x_j x_k − p_j p_k)],
/// the quadrature form of i(α a_j† a_k† − α* a_j a_k).
inline HamiltonianMatrix adjacency_to_hamiltonian(const AdjacencyMatrix& adjacency) {
    const ComplexMatrix& a = adjacency.matrix();
    const Eigen::Index n = a.rows();
    for (Eigen::Index j = 0; j < n; ++j)
        if (std::abs(a(j, j)) != 0.0)
            throw std::invalid_argument("adjacency has a diagonal entry at mode " +
                                        to_string(adjacency.modes()[static_cast<std::size_t>(j)]) +
                                        "; single-mode squeezing is not supported");

    Matrix h = Matrix::Zero(2 * n, 2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
            const Complex alpha = a(j, k);
            if (alpha == Complex(0.0, 0.0)) continue;
            const double re = alpha.real();
            const double im = alpha.imag();
            const Eigen::Index xj = 2 * j, pj = 2 * j + 1, xk = 2 * k, pk = 2 * k + 1;
            h(xj, pk) += re;
            h(pk, xj) += re;
            h(pj, xk) += re;
            h(xk, pj) += re;
            h(xj, xk) -= im;
            h(xk, xj) -= im;
            h(pj, pk) += im;
            h(pk, pj) += im;
        }
    }
    return {std::move(h), adjacency.modes()};
}

/// i[[A, 0], [0, −A*]] in the (a†₁..a†ₙ, a₁..aₙ) basis.
inline ComplexMatrix mode_basis_hamiltonian(const AdjacencyMatrix& adjacency) {
    const ComplexMatrix& a = adjacency.matrix();
    const Eigen::Index n = a.rows();
    const Complex i(0.0, 1.0);
    ComplexMatrix h = ComplexMatrix::Zero(2 * n, 2 * n);
    h.topLeftCorner(n, n) = i * a;
    h.bottomRightCorner(n, n) = -i * a.conjugate();
    return h;
}

/// T with (a†, a) = T r, r = (x₁, p₁, x₂, p₂, ...).
inline ComplexMatrix mode_to_quadrature_transform(std::size_t n_modes) {
    const auto n = static_cast<Eigen::Index>(n_modes);
    const double s = 1.0 / std::numbers::sqrt2;
    const Complex i(0.0, 1.0);
    ComplexMatrix t = ComplexMatrix::Zero(2 * n, 2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        t(k, 2 * k) = s;
        t(k, 2 * k + 1) = -i * s;
        t(n + k, 2 * k) = s;
        t(n + k, 2 * k + 1) = i * s;
    }
    return t;
}

/// Undirected DOT graph; edge label |α|, edge attribute phase = arg α.
inline std::string export_graph_dot(const AdjacencyMatrix& adjacency, const std::string& name = "pump_graph") {
    std::ostringstream os;
    os.precision(17);
    os << "graph \"" << name << "\" {\n";
    for (const auto& m : adjacency.modes()) os << "  \"" << to_string(m) << "\";\n";
    const ComplexMatrix& a = adjacency.matrix();
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
        for (Eigen::Index k = j + 1; k < a.cols(); ++k) {
            if (a(j, k) == Complex(0.0, 0.0)) continue;
            os << "  \"" << to_string(adjacency.modes()[static_cast<std::size_t>(j)]) << "\" -- \""
               << to_string(adjacency.modes()[static_cast<std::size_t>(k)]) << "\" [label=\"" << std::abs(a(j, k))
               << "\", phase=\"" << std::arg(a(j, k)) << "\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace gausscomb
