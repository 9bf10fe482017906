#pragma once

#include <gausscomb/dynamics.hpp>
#include <gausscomb/gaussian.hpp>
#include <gausscomb/pump_graph.hpp>

#include <cmath>
#include <utility>
#include <vector>

namespace gausscomb {

enum class Topology { symmetric, asymmetric };

inline const char* to_string(Topology t) { return t == Topology::symmetric ? "symmetric" : "asymmetric"; }

/// One point of the graph → Hamiltonian → steady state → pair metrics pipeline.
struct Scenario {
    std::vector<PumpTone> pumps;
    Topology topology = Topology::symmetric;
    double theta = 0.0;
    double n_bar = 1.0;
    bool monitored = true;
    std::pair<int, int> pair{-1, 1};
    double kappa = 1.0;
    RiccatiOptions solver{};
};

struct ScenarioMetrics {
    double log_negativity = 0.0;
    double purity_pair = 1.0;
    double purity_full = 1.0;
    double nu_tilde_minus = 1.0;
    bool converged = false;
    double residual = 0.0;
    SteadyStateMethod method = SteadyStateMethod::lyapunov;
    std::string diagnostic;
};

inline AdjacencyMatrix scenario_adjacency(const Scenario& s) {
    return s.topology == Topology::symmetric ? build_symmetric_adjacency(s.pumps) : build_asymmetric_adjacency(s.pumps);
}

/// Steady state for the scenario. Unmonitored scenarios above threshold throw
/// ThresholdExceeded.
inline SteadyStateResult scenario_steady_state(const Scenario& s) {
    const AdjacencyMatrix adjacency = scenario_adjacency(s);
    const HamiltonianMatrix h = adjacency_to_hamiltonian(adjacency);
    const DriftDiffusion dd = assemble_drift_diffusion(h, s.kappa);
    if (!s.monitored) return solve_lyapunov_steady(dd);
    return solve_riccati_steady(dd, effective_measurement(s.theta, s.n_bar, adjacency.size()), s.solver);
}

inline ScenarioMetrics metrics_from_state(const SteadyStateResult& state, std::pair<int, int> pair) {
    ScenarioMetrics m;
    m.converged = state.converged;
    m.residual = state.residual;
    m.method = state.method;
    m.diagnostic = state.diagnostic;
    const CovarianceMatrix reduced = partial_trace(state.sigma, std::vector<int>{pair.first, pair.second});
    const TwoModeMetrics two = log_negativity(reduced);
    m.log_negativity = two.log_negativity;
    m.purity_pair = two.purity;
    m.nu_tilde_minus = two.nu_tilde_minus;
    m.purity_full = purity(state.sigma);
    return m;
}

inline ScenarioMetrics scenario_metrics(const Scenario& s) {
    if (s.pair.first == s.pair.second || !universe_mode_set().contains(s.pair.first) ||
        !universe_mode_set().contains(s.pair.second))
        throw std::invalid_argument("pair must be two distinct system modes");
    return metrics_from_state(scenario_steady_state(s), s.pair);
}

}  // namespace gausscomb
