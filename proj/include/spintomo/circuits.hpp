#pragma once

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "spintomo/indicators.hpp"
#include "spintomo/rng.hpp"
#include "spintomo/states.hpp"
#include "spintomo/tomography.hpp"

namespace spintomo {

enum class GateKind { H, X, RX, SDG, CNOT, CRX };

struct Gate {
    GateKind kind = GateKind::H;
    int target = 0;
    int control = -1;  // CNOT/CRX only
    double angle = 0.0;  // RX/CRX only
};

inline Gate gate_h(int t) { return {GateKind::H, t, -1, 0.0}; }
inline Gate gate_x(int t) { return {GateKind::X, t, -1, 0.0}; }
inline Gate gate_rx(int t, double angle) { return {GateKind::RX, t, -1, angle}; }
inline Gate gate_sdg(int t) { return {GateKind::SDG, t, -1, 0.0}; }
inline Gate gate_cnot(int control, int target) { return {GateKind::CNOT, target, control, 0.0}; }
inline Gate gate_crx(int control, int target, double angle) { return {GateKind::CRX, target, control, angle}; }

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;
    std::vector<Axis> meas_basis;  // one per qubit; Z unless basis_change set it

    explicit Circuit(int n = 0) : n_qubits(n), meas_basis(n, Axis::Z) {}

    void validate() const {
        if (n_qubits < 1) throw std::invalid_argument("circuit: need at least one qubit");
        for (const Gate& g : gates) {
            if (g.target < 0 || g.target >= n_qubits) throw std::invalid_argument("circuit: target out of range");
            const bool controlled = g.kind == GateKind::CNOT || g.kind == GateKind::CRX;
            if (controlled) {
                if (g.control < 0 || g.control >= n_qubits || g.control == g.target) {
                    throw std::invalid_argument("circuit: bad control qubit");
                }
            }
        }
    }
};

// Single-qubit matrix of a gate kind (the controlled kinds use the matrix of
// their target action).
inline CMat gate_matrix(GateKind kind, double angle = 0.0) {
    CMat m(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    switch (kind) {
        case GateKind::H:
            m(0, 0) = r;
            m(0, 1) = r;
            m(1, 0) = r;
            m(1, 1) = -r;
            return m;
        case GateKind::X:
        case GateKind::CNOT:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            return m;
        case GateKind::SDG:
            m(0, 0) = 1.0;
            m(1, 1) = cx(0.0, -1.0);
            return m;
        case GateKind::RX:
        case GateKind::CRX:
            m(0, 0) = std::cos(angle / 2.0);
            m(0, 1) = cx(0.0, -std::sin(angle / 2.0));
            m(1, 0) = cx(0.0, -std::sin(angle / 2.0));
            m(1, 1) = std::cos(angle / 2.0);
            return m;
    }
    throw std::logic_error("unreachable");
}

namespace detail {

inline void apply_single(std::vector<cx>& amps, int n, int target, const CMat& g, int control = -1) {
    const int ts = n - 1 - target;
    const int cs = control >= 0 ? n - 1 - control : -1;
    const std::size_t dim = amps.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i >> ts) & 1) continue;
        if (cs >= 0 && ((i >> cs) & 1) == 0) continue;
        const std::size_t j = i | (std::size_t(1) << ts);
        const cx a0 = amps[i], a1 = amps[j];
        amps[i] = g(0, 0) * a0 + g(0, 1) * a1;
        amps[j] = g(1, 0) * a0 + g(1, 1) * a1;
    }
}

}  // namespace detail

// Exact amplitudes after applying the gate list to |0...0>; measurement
// bases are ignored here.
inline PureState simulate_statevector(const Circuit& circuit) {
    circuit.validate();
    std::vector<cx> amps(std::size_t(1) << circuit.n_qubits);
    amps[0] = 1.0;
    for (const Gate& g : circuit.gates) {
        detail::apply_single(amps, circuit.n_qubits, g.target, gate_matrix(g.kind, g.angle),
                             g.kind == GateKind::CNOT || g.kind == GateKind::CRX ? g.control : -1);
    }
    return PureState(circuit.n_qubits, std::move(amps));
}

// Append the measurement basis changes: H for x, S-dagger then H for y,
// nothing for z; records the basis per qubit.
inline Circuit basis_change(Circuit circuit, const std::vector<Axis>& basis_per_qubit) {
    if (static_cast<int>(basis_per_qubit.size()) != circuit.n_qubits) {
        throw std::invalid_argument("basis_change: need one basis per qubit");
    }
    for (int q = 0; q < circuit.n_qubits; ++q) {
        switch (basis_per_qubit[q]) {
            case Axis::X:
                circuit.gates.push_back(gate_h(q));
                break;
            case Axis::Y:
                circuit.gates.push_back(gate_sdg(q));
                circuit.gates.push_back(gate_h(q));
                break;
            case Axis::Z:
                break;
        }
    }
    circuit.meas_basis = basis_per_qubit;
    return circuit;
}

struct ShotResult {
    std::vector<std::uint64_t> counts;  // per bitstring, 2^n entries
    std::uint64_t n_shots = 0;
    std::uint64_t seed = 0;
};

// Multinomial sampling of z-basis outcomes by inverse CDF over a
// counter-based stream; identical counts for identical (circuit, seed).
inline ShotResult sample_shots(const Circuit& circuit, std::uint64_t n_shots, std::uint64_t seed) {
    if (n_shots < 1) throw std::invalid_argument("sample_shots: need at least one shot");
    const PureState psi = simulate_statevector(circuit);
    const std::size_t dim = psi.amplitudes.size();
    std::vector<double> cdf(dim);
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        acc += std::norm(psi.amplitudes[i]);
        cdf[i] = acc;
    }
    ShotResult res;
    res.counts.assign(dim, 0);
    res.n_shots = n_shots;
    res.seed = seed;
    SplitMix64 stream = derived_stream(seed, 0x5407ULL);
    for (std::uint64_t k = 0; k < n_shots; ++k) {
        const double u = stream.next_double() * acc;
        // Bin i owns [cdf[i-1], cdf[i]); upper_bound keeps zero-mass bins
        // unreachable even when u lands exactly on a boundary.
        const std::size_t idx = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        ++res.counts[std::min(idx, dim - 1)];
    }
    return res;
}

// Four-qubit equivalent circuit: q0 purifies the mediator mixture, q1 is the
// mediator, (q2, q3) carry the probe pair. Discarding (q0, q1) leaves the
// probe marginal at scaled time theta/4.
inline Circuit build_equivalent_circuit(double theta) {
    if (theta < 0.0 || theta >= std::numbers::pi) {
        throw std::invalid_argument("build_equivalent_circuit: theta must lie in [0, pi)");
    }
    Circuit c(4);
    c.gates = {
        gate_h(0),
        gate_cnot(0, 1),
        gate_h(1),            // q0=0 branch -> |+> on q1, q0=1 branch -> |->
        gate_h(2),
        gate_cnot(2, 3),
        gate_x(3),            // |phi+> on (q2, q3)
        gate_cnot(0, 3),      // flip to |psi+> on the q0=1 branch
        gate_rx(2, theta),
        gate_crx(0, 2, -2.0 * theta),  // net RX(+-theta) conditioned on the branch
    };
    return c;
}

enum class InitialStateVariant { ThetaZero, Compact };

inline Circuit build_initial_state_circuit(InitialStateVariant variant) {
    if (variant == InitialStateVariant::ThetaZero) return build_equivalent_circuit(0.0);
    Circuit c(4);
    c.gates = {
        gate_h(0),
        gate_h(2),
        gate_cnot(2, 3),
        gate_x(3),
        gate_cnot(0, 3),
    };
    return c;
}

namespace detail {

// Outcome distribution over the measured qubits, with the x-basis bit flip
// that aligns the raw z-readout after H with the m-labels of the tomogram
// convention (H maps the +1/2 eigenstate of sigma_x to |0>).
inline std::vector<double> measured_distribution(const std::vector<double>& full_probs, int n_qubits,
                                                 const std::vector<int>& measured, const std::string& axes) {
    const int m = static_cast<int>(measured.size());
    std::vector<double> out(std::size_t(1) << m, 0.0);
    for (std::size_t idx = 0; idx < full_probs.size(); ++idx) {
        int o = 0;
        for (int k = 0; k < m; ++k) {
            int bit = (idx >> (n_qubits - 1 - measured[k])) & 1;
            if (axes[k] == 'x') bit ^= 1;
            o |= bit << (m - 1 - k);
        }
        out[o] += full_probs[idx];
    }
    return out;
}

}  // namespace detail

struct ShotTomographyResult {
    std::vector<Tomogram> tomograms;  // one per repetition
    std::vector<double> xi_tei;       // per repetition
    double xi_tei_mean = 0.0;
    double xi_tei_std = 0.0;          // sample standard deviation
    std::uint64_t n_shots = 0;
    int repetitions = 0;
    std::uint64_t seed = 0;
};

// Empirical tomograms over every axis combination on the measured qubits,
// one per repetition, with xi_TEI summarised as mean +- std. Per-run seeds
// derive from (seed, repetition, basis index).
inline ShotTomographyResult tomogram_from_shots(const Circuit& circuit, std::uint64_t n_shots, int repetitions,
                                                std::uint64_t seed, const std::vector<int>& measured = {2, 3}) {
    if (repetitions < 1) throw std::invalid_argument("tomogram_from_shots: need at least one repetition");
    if (measured.size() != 2) throw std::invalid_argument("tomogram_from_shots: two measured qubits expected");
    const auto keys = all_axis_keys(static_cast<int>(measured.size()));
    ShotTomographyResult res;
    res.n_shots = n_shots;
    res.repetitions = repetitions;
    res.seed = seed;
    const Bipartition bp{{0}, {1}};
    for (int rep = 0; rep < repetitions; ++rep) {
        Tomogram tom;
        tom.n_qubits = static_cast<int>(measured.size());
        for (std::size_t b = 0; b < keys.size(); ++b) {
            std::vector<Axis> bases(circuit.n_qubits, Axis::Z);
            for (std::size_t k = 0; k < measured.size(); ++k) {
                bases[measured[k]] = axis_from_char(keys[b][k]);
            }
            const Circuit run = basis_change(circuit, bases);
            const std::uint64_t run_seed = mix_key(mix_key(seed, static_cast<std::uint64_t>(rep)), b);
            const ShotResult shots = sample_shots(run, n_shots, run_seed);
            std::vector<double> full(shots.counts.size());
            for (std::size_t i = 0; i < full.size(); ++i) {
                full[i] = static_cast<double>(shots.counts[i]) / static_cast<double>(n_shots);
            }
            tom.insert_slice(keys[b], detail::measured_distribution(full, circuit.n_qubits, measured, keys[b]));
        }
        res.xi_tei.push_back(average_indicators(tom, bp).averages.xi_tei);
        res.tomograms.push_back(std::move(tom));
    }
    double mean = 0.0;
    for (double v : res.xi_tei) mean += v;
    mean /= res.xi_tei.size();
    double var = 0.0;
    for (double v : res.xi_tei) var += (v - mean) * (v - mean);
    res.xi_tei_mean = mean;
    res.xi_tei_std = res.xi_tei.size() > 1 ? std::sqrt(var / (res.xi_tei.size() - 1)) : 0.0;
    return res;
}

// Infinite-shot limit: exact outcome probabilities fed through the same
// basis-change and assembly path as the sampled tomograms.
inline Tomogram exact_measurement_tomogram(const Circuit& circuit, const std::vector<int>& measured = {2, 3}) {
    const auto keys = all_axis_keys(static_cast<int>(measured.size()));
    Tomogram tom;
    tom.n_qubits = static_cast<int>(measured.size());
    for (const auto& key : keys) {
        std::vector<Axis> bases(circuit.n_qubits, Axis::Z);
        for (std::size_t k = 0; k < measured.size(); ++k) bases[measured[k]] = axis_from_char(key[k]);
        const PureState psi = simulate_statevector(basis_change(circuit, bases));
        std::vector<double> full(psi.amplitudes.size());
        for (std::size_t i = 0; i < full.size(); ++i) full[i] = std::norm(psi.amplitudes[i]);
        tom.insert_slice(key, detail::measured_distribution(full, circuit.n_qubits, measured, key));
    }
    return tom;
}

inline const char* gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::RX: return "RX";
        case GateKind::SDG: return "SDG";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CRX: return "CRX";
    }
    return "?";
}

// One gate per line: NAME target [control] [angle].
inline std::string circuit_to_text(const Circuit& circuit) {
    std::string out;
    char buf[64];
    for (const Gate& g : circuit.gates) {
        switch (g.kind) {
            case GateKind::H:
            case GateKind::X:
            case GateKind::SDG:
                std::snprintf(buf, sizeof buf, "%s %d\n", gate_name(g.kind), g.target);
                break;
            case GateKind::RX:
                std::snprintf(buf, sizeof buf, "RX %d %.17g\n", g.target, g.angle);
                break;
            case GateKind::CNOT:
                std::snprintf(buf, sizeof buf, "CNOT %d %d\n", g.target, g.control);
                break;
            case GateKind::CRX:
                std::snprintf(buf, sizeof buf, "CRX %d %d %.17g\n", g.target, g.control, g.angle);
                break;
        }
        out += buf;
    }
    return out;
}

inline Circuit circuit_from_text(const std::string& text, int n_qubits = 0) {
    std::istringstream in(text);
    std::string line;
    std::vector<Gate> gates;
    int max_index = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string name;
        ls >> name;
        Gate g;
        if (name == "H" || name == "X" || name == "SDG") {
            g.kind = name == "H" ? GateKind::H : name == "X" ? GateKind::X : GateKind::SDG;
            if (!(ls >> g.target)) throw std::invalid_argument("circuit_from_text: bad line '" + line + "'");
        } else if (name == "RX") {
            g.kind = GateKind::RX;
            if (!(ls >> g.target >> g.angle)) throw std::invalid_argument("circuit_from_text: bad line '" + line + "'");
        } else if (name == "CNOT") {
            g.kind = GateKind::CNOT;
            if (!(ls >> g.target >> g.control)) throw std::invalid_argument("circuit_from_text: bad line '" + line + "'");
        } else if (name == "CRX") {
            g.kind = GateKind::CRX;
            if (!(ls >> g.target >> g.control >> g.angle)) {
                throw std::invalid_argument("circuit_from_text: bad line '" + line + "'");
            }
        } else {
            throw std::invalid_argument("circuit_from_text: unknown gate '" + name + "'");
        }
        max_index = std::max({max_index, g.target, g.control});
        gates.push_back(g);
    }
    Circuit c(n_qubits > 0 ? n_qubits : max_index + 1);
    c.gates = std::move(gates);
    c.validate();
    return c;
}

}  // namespace spintomo
