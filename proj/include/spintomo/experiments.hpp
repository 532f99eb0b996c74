#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spintomo/cmat.hpp"
#include "spintomo/indicators.hpp"
#include "spintomo/measures.hpp"
#include "spintomo/squeezing.hpp"
#include "spintomo/states.hpp"
#include "spintomo/tomography.hpp"

namespace spintomo {

// Numeric evolution disagreeing with a closed form (or an invariant such as
// purity conservation) aborts the run; the CLI maps this to exit code 3.
struct CrossCheckError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("linspace: need at least 2 points");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    return out;
}

// Scalar-coupling Hamiltonian of the three-spin register in the rotating
// frame, (pi/2)(J_AM sAz sMz + J_BM sBz sMz + J_AB sAz sBz), couplings in
// Hz, qubit order (M, A, B).
inline CMat hamiltonian_i(double j_am_hz, double j_bm_hz, double j_ab_hz) {
    const CMat sz = sigma_z(), id = identity2();
    CMat h = j_am_hz * kron(kron(sz, sz), id);
    h += j_bm_hz * kron(kron(sz, id), sz);
    h += j_ab_hz * kron(kron(id, sz), sz);
    return 0.5 * std::numbers::pi * h;
}

// Effective mediated interaction 4 chi (sAx + sBx) sMx, qubit order (M, A, B).
inline CMat hamiltonian_s(double chi) {
    const CMat sx = sigma_x(), id = identity2();
    CMat h = kron(kron(sx, sx), id) + kron(kron(sx, id), sx);
    return 4.0 * chi * h;
}

// Closed-form state of the mediated register at scaled time chi*t:
// an equal mixture of |+>_M (cos|phi+> - i sin|psi+>) and
// |->_M (cos|psi+> + i sin|phi+>), arguments 2 chi t.
inline DensityMatrix rho_mab_closed_form(double chit) {
    const double c = std::cos(2.0 * chit), s = std::sin(2.0 * chit);
    const PureState phi = bell_phi_plus(), psi = bell_psi_plus();
    std::vector<cx> ab0(4), ab1(4);
    for (int k = 0; k < 4; ++k) {
        ab0[k] = c * phi.amplitudes[k] - cx(0, 1) * s * psi.amplitudes[k];
        ab1[k] = c * psi.amplitudes[k] + cx(0, 1) * s * phi.amplitudes[k];
    }
    const PureState p0 = tensor(plus_state(), PureState(2, ab0));
    const PureState p1 = tensor(minus_state(), PureState(2, ab1));
    CMat m = 0.5 * projector(p0).matrix + 0.5 * projector(p1).matrix;
    return DensityMatrix(3, std::move(m));
}

inline DensityMatrix rho_ab_closed_form(double chit) {
    const CMat r = partial_trace(rho_mab_closed_form(chit).matrix, {2, 2, 2}, {1, 2});
    return DensityMatrix(2, r);
}

struct ExperimentIConfig {
    std::vector<double> chi_t_grid = linspace(0.0, std::numbers::pi / 2.0, 65);
    int n_dir_samples = 800;
    int n_pairs = 320;
    std::uint64_t seed = kDefaultSamplingSeed;
    DiscordOptions discord;
    std::vector<std::string> reduced_subset = default_reduced_subset(2);

    void validate() const {
        if (chi_t_grid.empty()) throw std::invalid_argument("experiment I: empty time grid");
        for (std::size_t i = 0; i < chi_t_grid.size(); ++i) {
            if (chi_t_grid[i] < -1e-12 || chi_t_grid[i] > std::numbers::pi / 2.0 + 1e-12) {
                throw std::invalid_argument("experiment I: chi t grid must lie in [0, pi/2]");
            }
            if (i > 0 && chi_t_grid[i] <= chi_t_grid[i - 1]) {
                throw std::invalid_argument("experiment I: grid must be strictly increasing");
            }
        }
    }
};

struct ExperimentRecord {
    double t = 0.0;  // chi_s t for experiment I, seconds otherwise
    Tomogram tomogram;
    IndicatorReport indicators;
    double qmi = 0.0;
    std::optional<double> negativity;
    std::optional<DiscordResult> discord;
    SqueezingReport squeezing;
    std::optional<EntropicSqueezingReport> entropic_a;
    std::optional<EntropicSqueezingReport> entropic_b;
};

struct ExperimentRun {
    std::string label;
    std::vector<ExperimentRecord> records;
};

// Simulate the mediated-register experiment: closed form and numeric
// evolution cross-checked at every grid point, then the AB marginal drives
// tomograms, indicators, measures and squeezing.
inline ExperimentRun run_experiment_I(const ExperimentIConfig& cfg) {
    cfg.validate();
    const CMat h = hamiltonian_s(1.0);  // scaled time: chi_s = 1
    const DensityMatrix rho0 = rho_mab_initial();
    const Bipartition ab{{0}, {1}};

    ExperimentRun run;
    run.label = "I";
    for (double chit : cfg.chi_t_grid) {
        const DensityMatrix closed = rho_mab_closed_form(chit);
        const CMat numeric = evolve_matrix(rho0.matrix, h, chit);
        const double dev = frob_distance(numeric, closed.matrix);
        if (dev > 1e-10) {
            throw CrossCheckError("experiment I: numeric evolution deviates from the closed form by " +
                                  std::to_string(dev) + " at chi t = " + std::to_string(chit));
        }
        const DensityMatrix rho_ab(2, partial_trace(closed.matrix, {2, 2, 2}, {1, 2}));

        ExperimentRecord rec;
        rec.t = chit;
        rec.tomogram = full_tomogram(rho_ab);
        rec.indicators = average_indicators(rec.tomogram, ab);
        if (!cfg.reduced_subset.empty()) {
            const auto red = average_indicators(rec.tomogram, ab, cfg.reduced_subset);
            rec.indicators.reduced = ReducedAverages{cfg.reduced_subset, red.averages};
        }
        rec.qmi = qmi(rho_ab, ab);
        rec.negativity = negativity(rho_ab, ab);
        rec.discord = discord(rho_ab, ab, Side::B, cfg.discord);  // D(A:B), measurements on B
        SqueezingParams sp;
        sp.n_samples = cfg.n_dir_samples;
        sp.n_pairs = cfg.n_pairs;
        sp.seed = cfg.seed;
        rec.squeezing = squeezing_report(SpinMoments::from_density(rho_ab), sp);
        rec.squeezing.t = chit;
        rec.entropic_a = entropic_squeezing_check(rec.tomogram, 0);
        rec.entropic_b = entropic_squeezing_check(rec.tomogram, 1);
        run.records.push_back(std::move(rec));
    }
    return run;
}

struct ExperimentNConfig {
    int n_qubits = 2;
    std::vector<double> omega;                  // rad/s
    std::vector<double> big_omega;              // rad/s
    std::vector<std::vector<double>> lambda;    // rad/s, symmetric, zero diagonal
    double epsilon = 1e-4;
    std::vector<double> t_grid = linspace(0.0, 0.010, 101);
    std::string case_label;
    Bipartition bipartition;
    Side measured_side = Side::A;
    int n_dir_samples = 800;
    std::uint64_t seed = kDefaultSamplingSeed;
    DiscordOptions discord;
    PccSideValue pcc_mode = PccSideValue::CollectiveSum;
    std::vector<std::string> reduced_subset;    // empty: no reduced average

    void validate() const {
        if (n_qubits != 2 && n_qubits != 3) throw std::invalid_argument("experiment N: n_qubits must be 2 or 3");
        const auto n = static_cast<std::size_t>(n_qubits);
        if (omega.size() != n || big_omega.size() != n || lambda.size() != n) {
            throw std::invalid_argument("experiment N: parameter arrays must have one entry per qubit");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (lambda[i].size() != n) throw std::invalid_argument("experiment N: lambda must be n x n");
            if (lambda[i][i] != 0.0) throw std::invalid_argument("experiment N: lambda diagonal must vanish");
            for (std::size_t j = 0; j < n; ++j) {
                if (lambda[i][j] != lambda[j][i]) throw std::invalid_argument("experiment N: lambda must be symmetric");
            }
        }
        if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("experiment N: epsilon must lie in [0, 1]");
        if (t_grid.empty()) throw std::invalid_argument("experiment N: empty time grid");
        for (std::size_t i = 1; i < t_grid.size(); ++i) {
            if (t_grid[i] <= t_grid[i - 1]) throw std::invalid_argument("experiment N: grid must be strictly increasing");
        }
        bipartition.validate(n_qubits);
    }
};

// Driven-spin Hamiltonian sum_i (omega_i s_ix - Omega_i s_iz)
// + sum_{i<j} lambda_ij s_iz s_jz.
inline CMat hamiltonian_n(const ExperimentNConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_qubits;
    const int d = 1 << n;
    const CMat sx = sigma_x(), sz = sigma_z();
    auto embed = [&](const CMat& op, int q) {
        std::vector<CMat> f;
        for (int k = 0; k < n; ++k) f.push_back(k == q ? op : identity2());
        return kron(f);
    };
    auto embed2 = [&](int qi, int qj) {
        std::vector<CMat> f;
        for (int k = 0; k < n; ++k) f.push_back(k == qi || k == qj ? sz : identity2());
        return kron(f);
    };
    CMat h(d, d);
    for (int i = 0; i < n; ++i) {
        if (cfg.omega[i] != 0.0) h += cfg.omega[i] * embed(sx, i);
        if (cfg.big_omega[i] != 0.0) h -= cfg.big_omega[i] * embed(sz, i);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (cfg.lambda[i][j] != 0.0) h += cfg.lambda[i][j] * embed2(i, j);
        }
    }
    return h;
}

// Evolve the pseudo-pure initial state and record tomograms, indicators,
// measures and first-order squeezing on the configured bipartition.
inline ExperimentRun run_experiment_N(const ExperimentNConfig& cfg) {
    cfg.validate();
    const CMat h = hamiltonian_n(cfg);
    const HermEigen eig = herm_eig(h);
    const DensityMatrix rho0 = pseudo_pure(cfg.n_qubits, cfg.epsilon);
    const double purity0 = purity(rho0);

    ExperimentRun run;
    run.label = cfg.case_label.empty() ? "N" : cfg.case_label;
    const int d = 1 << cfg.n_qubits;
    for (double t : cfg.t_grid) {
        CMat u(d, d);
        for (int j = 0; j < d; ++j) {
            const cx ph = std::exp(cx(0.0, -eig.eigenvalues[j] * t));
            for (int i = 0; i < d; ++i) u(i, j) = eig.eigenvectors(i, j) * ph;
        }
        u = u * eig.eigenvectors.adjoint();
        const DensityMatrix rho(cfg.n_qubits, u * rho0.matrix * u.adjoint());
        const double pur = purity(rho);
        if (std::abs(pur - purity0) > 1e-10) {
            throw CrossCheckError("experiment " + run.label + ": purity drifted by " +
                                  std::to_string(std::abs(pur - purity0)) + " at t = " + std::to_string(t));
        }

        ExperimentRecord rec;
        rec.t = t;
        rec.tomogram = full_tomogram(rho);
        rec.indicators = average_indicators(rec.tomogram, cfg.bipartition, std::nullopt, cfg.pcc_mode);
        if (!cfg.reduced_subset.empty()) {
            const auto red = average_indicators(rec.tomogram, cfg.bipartition, cfg.reduced_subset, cfg.pcc_mode);
            rec.indicators.reduced = ReducedAverages{cfg.reduced_subset, red.averages};
        }
        rec.qmi = qmi(rho, cfg.bipartition);
        rec.negativity = negativity(rho, cfg.bipartition);
        rec.discord = discord(rho, cfg.bipartition, cfg.measured_side, cfg.discord);
        SqueezingParams sp;
        sp.n_samples = cfg.n_dir_samples;
        sp.seed = cfg.seed;
        sp.second_order = false;  // second-order analysis belongs to experiment I
        rec.squeezing = squeezing_report(SpinMoments::from_density(rho), sp);
        rec.squeezing.t = t;
        run.records.push_back(std::move(rec));
    }
    return run;
}

inline double hz(double f) { return 2.0 * std::numbers::pi * f; }

inline std::vector<std::string> preset_names() {
    return {"I", "II-i", "II-ii", "II-iii", "III-A", "III-B", "III-C", "III-D"};
}

inline ExperimentIConfig preset_experiment_I() { return ExperimentIConfig{}; }

// Case presets with the published constants: couplings and drives quoted in
// Hz are stored as 2*pi*f rad/s.
inline ExperimentNConfig preset_experiment_N(const std::string& case_label) {
    ExperimentNConfig cfg;
    cfg.case_label = case_label;
    if (case_label == "II-i" || case_label == "II-ii" || case_label == "II-iii") {
        cfg.n_qubits = 2;
        const double l12 = hz(868.0);
        cfg.lambda = {{0.0, l12}, {l12, 0.0}};
        cfg.big_omega = {l12 / 2.0, l12 / 2.0};
        if (case_label == "II-i") {
            cfg.omega = {hz(217.0), hz(217.0)};  // blockade
        } else if (case_label == "II-ii") {
            cfg.omega = {hz(217.0) / 4.0, hz(217.0)};  // freezing
        } else {
            cfg.omega = {hz(217.0), hz(217.0) / 4.0};  // freezing
        }
        cfg.bipartition = Bipartition{{0}, {1}};
        // D(31P : 19F): measurements on 19F, subsystem 1 (qubit 0).
        cfg.measured_side = Side::A;
        cfg.reduced_subset = default_reduced_subset(2);
        return cfg;
    }
    if (case_label == "III-A" || case_label == "III-B" || case_label == "III-C" || case_label == "III-D") {
        cfg.n_qubits = 3;
        const double l12 = hz(224.7), l13 = hz(-311.1), l23 = hz(49.7);
        cfg.lambda = {{0.0, l12, l13}, {l12, 0.0, l23}, {l13, l23, 0.0}};
        cfg.big_omega = {(l12 + l13) / 2.0, (l12 + l23) / 2.0, (l13 + l23) / 2.0};
        if (case_label == "III-A") {
            cfg.omega = {hz(10.0), hz(10.0), hz(10.0)};
            cfg.bipartition = Bipartition{{0}, {1, 2}};
        } else if (case_label == "III-B") {
            cfg.omega = {hz(50.0), hz(10.0), hz(10.0)};
            cfg.bipartition = Bipartition{{0}, {1, 2}};
        } else if (case_label == "III-C") {
            cfg.omega = {hz(10.0), hz(50.0), hz(10.0)};
            cfg.bipartition = Bipartition{{1}, {0, 2}};
        } else {
            cfg.omega = {hz(50.0), hz(50.0), hz(10.0)};
            cfg.bipartition = Bipartition{{0, 1}, {2}};
        }
        // Cases A-C measure the two-qubit side; case D measures 19F alone.
        cfg.measured_side = Side::B;
        return cfg;
    }
    throw std::invalid_argument("unknown case label '" + case_label + "'; valid: I, II-i, II-ii, II-iii, III-A..III-D");
}

}  // namespace spintomo
