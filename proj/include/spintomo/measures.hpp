#pragma once

#include <limits>
#include <numbers>
#include <vector>

#include "spintomo/cmat.hpp"
#include "spintomo/indicators.hpp"
#include "spintomo/optim.hpp"
#include "spintomo/rng.hpp"
#include "spintomo/states.hpp"
#include "spintomo/tomography.hpp"

namespace spintomo {

inline double svne(const CMat& rho) {
    const HermEigen eig = herm_eig(rho);
    double s = 0.0;
    for (double v : eig.eigenvalues) s -= xlog2x(std::max(0.0, v));
    return s;
}

inline double svne(const DensityMatrix& rho) { return svne(rho.matrix); }

namespace detail {

// Reorder so that side A occupies the most significant factors, returning
// the permuted matrix and the two side dimensions.
struct SplitRho {
    CMat matrix;
    int dim_a = 0;
    int dim_b = 0;
};

inline SplitRho split_by_bipartition(const DensityMatrix& rho, const Bipartition& bp) {
    bp.validate(rho.n_qubits);
    std::vector<int> order = bp.side_a;
    order.insert(order.end(), bp.side_b.begin(), bp.side_b.end());
    SplitRho out;
    out.matrix = permute_qubits(rho.matrix, order);
    out.dim_a = 1 << bp.side_a.size();
    out.dim_b = 1 << bp.side_b.size();
    return out;
}

}  // namespace detail

// Quantum mutual information S_A + S_B - S_AB, bits.
inline double qmi(const DensityMatrix& rho, const Bipartition& bipartition) {
    const auto sp = detail::split_by_bipartition(rho, bipartition);
    const CMat ra = partial_trace(sp.matrix, {sp.dim_a, sp.dim_b}, {0});
    const CMat rb = partial_trace(sp.matrix, {sp.dim_a, sp.dim_b}, {1});
    const double v = svne(ra) + svne(rb) - svne(sp.matrix);
    if (v < 0.0 && v > -1e-9) return 0.0;
    return v;
}

// Negativity: sum of the magnitudes of the negative partial-transpose
// eigenvalues. Independent of which side is transposed.
inline double negativity(const DensityMatrix& rho, const Bipartition& bipartition, int transposed_side = 0) {
    const auto sp = detail::split_by_bipartition(rho, bipartition);
    const CMat pt = partial_transpose(sp.matrix, {sp.dim_a, sp.dim_b}, transposed_side);
    const HermEigen eig = herm_eig(pt);
    double n = 0.0;
    for (double v : eig.eigenvalues) n += 0.5 * (std::abs(v) - v);
    return n;
}

enum class Side { A, B };
enum class MeasurementModel { FullVonNeumann, LocalProduct };

struct DiscordOptions {
    MeasurementModel model = MeasurementModel::FullVonNeumann;
    int grid_size = 32;              // coarse grid per angle, single-qubit side
    int restarts = 64;               // seeded restarts, two-qubit side
    int max_sweeps = 10;             // coordinate-descent sweeps per restart
    double nm_diameter_tol = 1e-7;   // Nelder-Mead stopping diameter
    double spread_tol = 1e-3;        // non-convergence flag threshold
    std::uint64_t seed = 0x5eed5eedULL;
};

struct DiscordResult {
    double value = 0.0;
    std::vector<double> params;      // optimal measurement parameters
    std::vector<double> best_trace;  // best objective seen per restart / refinement
    int restarts = 0;
    double objective_spread = 0.0;
    bool converged = true;
    std::uint64_t seed = 0;
};

namespace detail {

// Conditional state of the unmeasured side given basis column k of u, as an
// unnormalised block; its trace is the outcome probability.
inline CMat conditional_block(const CMat& rho, const CMat& u, int dim_m, int dim_r, int k) {
    CMat block(dim_r, dim_r);
    for (int m = 0; m < dim_m; ++m) {
        const cx um = std::conj(u(m, k));
        if (um == cx{}) continue;
        for (int mp = 0; mp < dim_m; ++mp) {
            const cx ump = u(mp, k);
            if (ump == cx{}) continue;
            const cx w = um * ump;
            for (int r = 0; r < dim_r; ++r) {
                for (int rp = 0; rp < dim_r; ++rp) {
                    block(r, rp) += w * rho(m * dim_r + r, mp * dim_r + rp);
                }
            }
        }
    }
    return block;
}

inline double entropy_2x2(const CMat& rho) {
    const double tr = rho.trace().real();
    const double det = (rho(0, 0) * rho(1, 1) - rho(0, 1) * rho(1, 0)).real();
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    const double l1 = 0.5 * (tr - disc), l2 = 0.5 * (tr + disc);
    return -xlog2x(std::max(0.0, l1)) - xlog2x(std::max(0.0, l2));
}

inline double conditional_entropy(const CMat& rho, const CMat& u, int dim_m, int dim_r) {
    double s = 0.0;
    for (int k = 0; k < dim_m; ++k) {
        CMat block = conditional_block(rho, u, dim_m, dim_r, k);
        const double p = block.trace().real();
        if (p < 1e-14) continue;
        block *= cx(1.0 / p);
        s += p * (dim_r == 2 ? entropy_2x2(block) : svne(block));
    }
    return s;
}

// Complex Givens rotation G(i,j): unitary, identity outside rows/cols i, j.
inline CMat givens(int n, int i, int j, double theta, double phi) {
    CMat g = CMat::identity(n);
    const double c = std::cos(theta), s = std::sin(theta);
    g(i, i) = c;
    g(i, j) = -s * std::exp(cx(0.0, -phi));
    g(j, i) = s * std::exp(cx(0.0, phi));
    g(j, j) = c;
    return g;
}

// Rank-1 von Neumann basis on a 4-dim measured side: product of the 6
// Givens rotations over index pairs, 12 parameters in total.
inline CMat unitary_from_givens(const std::vector<double>& params) {
    static const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    CMat u = CMat::identity(4);
    for (int k = 0; k < 6; ++k) {
        u = u * givens(4, pairs[k][0], pairs[k][1], params[2 * k], params[2 * k + 1]);
    }
    return u;
}

inline CMat unitary_local_product(const std::vector<double>& params) {
    return kron(rotation_u(params[0], params[1]), rotation_u(params[2], params[3]));
}

}  // namespace detail

// Quantum discord D(unmeasured : measured) per the conditional-entropy
// definition, minimising over rank-1 von Neumann measurements on the
// measured side. For a two-qubit measured side the minimisation is a
// seeded multi-restart coordinate descent and the result is an upper bound
// on the true conditional-entropy minimum.
inline DiscordResult discord(const DensityMatrix& rho, const Bipartition& bipartition, Side measured_side,
                             const DiscordOptions& opt = {}) {
    const Bipartition ordered = measured_side == Side::A ? bipartition
                                                         : Bipartition{bipartition.side_b, bipartition.side_a};
    const int n_meas = static_cast<int>(ordered.side_a.size());
    if (n_meas < 1 || n_meas > 2) {
        throw std::invalid_argument("discord: measured side must have 1 or 2 qubits");
    }
    const auto sp = detail::split_by_bipartition(rho, ordered);
    const int dim_m = sp.dim_a, dim_r = sp.dim_b;
    const double s_meas = svne(partial_trace(sp.matrix, {dim_m, dim_r}, {0}));
    const double s_joint = svne(sp.matrix);

    DiscordResult res;
    res.seed = opt.seed;

    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_params;

    if (n_meas == 1) {
        // Coarse grid over the measurement direction (antipodal redundancy
        // removed), then Nelder-Mead from the best three grid points.
        auto objective = [&](double theta, double phi) {
            return detail::conditional_entropy(sp.matrix, rotation_u(theta, phi), dim_m, dim_r);
        };
        struct Node {
            double f, theta, phi;
        };
        std::vector<Node> nodes;
        for (int i = 0; i < opt.grid_size; ++i) {
            const double theta = (i + 0.5) * std::numbers::pi / opt.grid_size;
            for (int j = 0; j < opt.grid_size; ++j) {
                const double phi = j * std::numbers::pi / opt.grid_size;
                nodes.push_back({objective(theta, phi), theta, phi});
            }
        }
        std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.f < b.f; });
        best = nodes.front().f;
        best_params = {nodes.front().theta, nodes.front().phi};
        res.best_trace.push_back(best);

        std::vector<std::vector<double>> simplex;
        for (int k = 0; k < 3; ++k) simplex.push_back({nodes[k].theta, nodes[k].phi});
        // Guard against a collinear starting simplex on flat landscapes.
        simplex[1][0] += 1e-4;
        simplex[2][1] += 1e-4;
        const auto nm = nelder_mead([&](const std::vector<double>& x) { return objective(x[0], x[1]); }, simplex,
                                    opt.nm_diameter_tol);
        res.converged = nm.converged;
        res.best_trace.push_back(nm.value);
        if (nm.value < best) {
            best = nm.value;
            best_params = nm.x;
        }
        res.restarts = 1;
        res.objective_spread = 0.0;
    } else {
        const bool full = opt.model == MeasurementModel::FullVonNeumann;
        const int n_params = full ? 12 : 4;
        auto objective = [&](const std::vector<double>& p) {
            const CMat u = full ? detail::unitary_from_givens(p) : detail::unitary_local_product(p);
            return detail::conditional_entropy(sp.matrix, u, dim_m, dim_r);
        };
        for (int restart = 0; restart < opt.restarts; ++restart) {
            SplitMix64 stream = derived_stream(opt.seed, static_cast<std::uint64_t>(restart));
            std::vector<double> x(n_params);
            for (int k = 0; k < n_params; ++k) {
                x[k] = stream.next_double() * (k % 2 == 0 ? std::numbers::pi : 2.0 * std::numbers::pi);
            }
            double fx = objective(x);
            for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
                const double f_before = fx;
                for (int k = 0; k < n_params; ++k) {
                    const double period = k % 2 == 0 ? std::numbers::pi : 2.0 * std::numbers::pi;
                    auto line = [&](double v) {
                        std::vector<double> y = x;
                        y[k] = v;
                        return objective(y);
                    };
                    // Bracket with a coarse scan of the period, then refine.
                    double lo = x[k] - 0.5 * period, hi = x[k] + 0.5 * period;
                    double cbest = x[k], fbest = fx;
                    for (int s = 0; s < 16; ++s) {
                        const double v = lo + (s + 0.5) * (hi - lo) / 16.0;
                        const double fv = line(v);
                        if (fv < fbest) {
                            fbest = fv;
                            cbest = v;
                        }
                    }
                    const double span = (hi - lo) / 16.0;
                    const double v = golden_section(line, cbest - span, cbest + span, 1e-9);
                    const double fv = line(v);
                    if (fv < fx) {
                        x[k] = v;
                        fx = fv;
                    } else if (fbest < fx) {
                        x[k] = cbest;
                        fx = fbest;
                    }
                }
                if (f_before - fx < 1e-11) break;
            }
            res.best_trace.push_back(fx);
            if (fx < best) {
                best = fx;
                best_params = x;
            }
        }
        // Final simplex polish around the best restart; coordinate descent
        // stalls on correlated parameter directions at the 1e-5 level.
        if (!best_params.empty()) {
            std::vector<std::vector<double>> simplex{best_params};
            for (int k = 0; k < n_params; ++k) {
                std::vector<double> v = best_params;
                v[k] += 0.02;
                simplex.push_back(std::move(v));
            }
            const auto nm = nelder_mead(objective, simplex, opt.nm_diameter_tol, 4000);
            res.best_trace.push_back(nm.value);
            if (nm.value < best) {
                best = nm.value;
                best_params = nm.x;
            }
        }
        res.restarts = opt.restarts;
        // Spread across the restarts themselves, excluding the polish entry.
        double lo = res.best_trace.front(), hi = res.best_trace.front();
        for (int k = 0; k < opt.restarts; ++k) {
            lo = std::min(lo, res.best_trace[k]);
            hi = std::max(hi, res.best_trace[k]);
        }
        res.objective_spread = hi - lo;
        res.converged = res.objective_spread <= opt.spread_tol;
    }

    res.value = s_meas - s_joint + best;
    res.params = best_params;
    return res;
}

}  // namespace spintomo
