#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spintomo/tomography.hpp"

namespace spintomo {

inline double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

// Tomographic (Shannon) entropy of one slice, in bits; 0 log 0 = 0.
inline double slice_entropy(const std::vector<double>& probs) {
    double sum = 0.0, h = 0.0;
    for (double p : probs) {
        if (p < -1e-12) throw std::invalid_argument("slice_entropy: negative probability");
        sum += p;
        h -= xlog2x(std::max(0.0, p));
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("slice_entropy: probabilities sum to " + std::to_string(sum));
    }
    return h;
}

namespace detail {

inline void check_marginals(const std::vector<double>& joint, const std::vector<double>& ma,
                            const std::vector<double>& mb, double tol = 1e-9) {
    const std::size_t na = ma.size(), nb = mb.size();
    if (joint.size() != na * nb) throw std::invalid_argument("indicator: joint size != |A| * |B|");
    for (std::size_t i = 0; i < na; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < nb; ++j) s += joint[i * nb + j];
        if (std::abs(s - ma[i]) > tol) throw DataError("indicator: marginal A inconsistent with joint");
    }
    for (std::size_t j = 0; j < nb; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < na; ++i) s += joint[i * nb + j];
        if (std::abs(s - mb[j]) > tol) throw DataError("indicator: marginal B inconsistent with joint");
    }
}

inline double clamp_small_negative(double v, const char* what) {
    if (v >= 0.0) return v;
    if (v > -1e-9) return 0.0;
    throw DataError(std::string(what) + ": value " + std::to_string(v) + " below tolerance");
}

}  // namespace detail

// Mutual information of the slice: S(A) + S(B) - S(AB), bits.
inline double eps_tei(const std::vector<double>& joint, const std::vector<double>& marginal_a,
                      const std::vector<double>& marginal_b) {
    detail::check_marginals(joint, marginal_a, marginal_b);
    const double v = slice_entropy(marginal_a) + slice_entropy(marginal_b) - slice_entropy(joint);
    return detail::clamp_small_negative(v, "eps_tei");
}

// Kullback-Leibler divergence of the joint from the marginal product; equal
// to eps_tei by construction and kept as the independent algebraic route.
inline double kl_mutual_information(const std::vector<double>& joint, const std::vector<double>& marginal_a,
                                    const std::vector<double>& marginal_b) {
    detail::check_marginals(joint, marginal_a, marginal_b);
    const std::size_t na = marginal_a.size(), nb = marginal_b.size();
    double d = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            const double p = joint[i * nb + j];
            if (p <= 0.0) continue;
            const double q = marginal_a[i] * marginal_b[j];
            if (q <= 0.0) throw DataError("kl: joint mass where the marginal product vanishes");
            d += p * std::log2(p / q);
        }
    }
    return detail::clamp_small_negative(d, "kl_mutual_information");
}

// 1 + eta_AB - eta_A - eta_B from inverse participation ratios; equals
// (1 - eta_A)(1 - eta_B) on factorised slices, so it does NOT vanish on
// product states.
inline double eps_ipr(const std::vector<double>& joint, const std::vector<double>& marginal_a,
                      const std::vector<double>& marginal_b) {
    detail::check_marginals(joint, marginal_a, marginal_b);
    auto ipr = [](const std::vector<double>& p) {
        double s = 0.0;
        for (double v : p) s += v * v;
        return s;
    };
    const double v = 1.0 + ipr(joint) - ipr(marginal_a) - ipr(marginal_b);
    return detail::clamp_small_negative(v, "eps_ipr");
}

struct PccResult {
    double value = 0.0;
    bool degenerate = false;  // a side had (numerically) zero outcome variance
};

// |Pearson correlation| of the outcome values in the slice. A deterministic
// side has no detectable linear correlation; that case is defined as 0 and
// flagged.
inline PccResult eps_pcc(const std::vector<double>& joint, const std::vector<double>& values_a,
                         const std::vector<double>& values_b) {
    const std::size_t na = values_a.size(), nb = values_b.size();
    if (joint.size() != na * nb) throw std::invalid_argument("eps_pcc: joint size != |A| * |B|");
    double ea = 0.0, eb = 0.0, eaa = 0.0, ebb = 0.0, eab = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            const double p = joint[i * nb + j];
            ea += p * values_a[i];
            eb += p * values_b[j];
            eaa += p * values_a[i] * values_a[i];
            ebb += p * values_b[j] * values_b[j];
            eab += p * values_a[i] * values_b[j];
        }
    }
    const double var_a = std::max(0.0, eaa - ea * ea);
    const double var_b = std::max(0.0, ebb - eb * eb);
    const double sd_a = std::sqrt(var_a), sd_b = std::sqrt(var_b);
    if (sd_a < 1e-12 || sd_b < 1e-12) return {0.0, true};
    const double pcc = (eab - ea * eb) / (sd_a * sd_b);
    return {std::min(1.0, std::abs(pcc)), false};
}

// Bhattacharyya distance of the joint from the marginal product, bits.
// Jensen: eps_bd <= eps_tei / 2.
inline double eps_bd(const std::vector<double>& joint, const std::vector<double>& marginal_a,
                     const std::vector<double>& marginal_b) {
    detail::check_marginals(joint, marginal_a, marginal_b);
    const std::size_t na = marginal_a.size(), nb = marginal_b.size();
    double s = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            s += std::sqrt(std::max(0.0, joint[i * nb + j] * marginal_a[i] * marginal_b[j]));
        }
    }
    return detail::clamp_small_negative(-std::log2(s), "eps_bd");
}

// Two nonempty disjoint qubit groups covering the register.
struct Bipartition {
    std::vector<int> side_a;
    std::vector<int> side_b;

    void validate(int n_qubits) const {
        if (side_a.empty() || side_b.empty()) throw std::invalid_argument("bipartition: sides must be nonempty");
        std::vector<bool> seen(n_qubits, false);
        for (const auto* side : {&side_a, &side_b}) {
            for (int q : *side) {
                if (q < 0 || q >= n_qubits) throw std::invalid_argument("bipartition: qubit index out of range");
                if (seen[q]) throw std::invalid_argument("bipartition: qubit listed twice");
                seen[q] = true;
            }
        }
        for (int q = 0; q < n_qubits; ++q) {
            if (!seen[q]) throw std::invalid_argument("bipartition: qubit " + std::to_string(q) + " unassigned");
        }
    }
};

// How a multi-qubit side's outcome value is formed for PCC.
enum class PccSideValue { CollectiveSum, PerQubitMax };

namespace detail {

struct CompositeSlice {
    std::vector<double> joint;   // |A| x |B|, side-A index major
    std::vector<double> marg_a;
    std::vector<double> marg_b;
    std::vector<double> values_a;
    std::vector<double> values_b;
};

inline double side_value(int composite_index, int n_side, PccSideValue mode) {
    double sum = 0.0, best = -1.0;
    for (int k = 0; k < n_side; ++k) {
        const double m = ((composite_index >> (n_side - 1 - k)) & 1) ? 0.5 : -0.5;
        sum += m;
        best = std::max(best, m);
    }
    return mode == PccSideValue::CollectiveSum ? sum : best;
}

inline CompositeSlice composite_slice(const std::vector<double>& probs, int n_qubits, const Bipartition& bp,
                                      PccSideValue mode) {
    const int na_bits = static_cast<int>(bp.side_a.size());
    const int nb_bits = static_cast<int>(bp.side_b.size());
    const int na = 1 << na_bits, nb = 1 << nb_bits;
    CompositeSlice out;
    out.joint.assign(static_cast<std::size_t>(na) * nb, 0.0);
    out.marg_a.assign(na, 0.0);
    out.marg_b.assign(nb, 0.0);
    for (int idx = 0; idx < (1 << n_qubits); ++idx) {
        int ia = 0, ib = 0;
        for (int k = 0; k < na_bits; ++k) {
            ia |= ((idx >> (n_qubits - 1 - bp.side_a[k])) & 1) << (na_bits - 1 - k);
        }
        for (int k = 0; k < nb_bits; ++k) {
            ib |= ((idx >> (n_qubits - 1 - bp.side_b[k])) & 1) << (nb_bits - 1 - k);
        }
        const double p = probs[idx];
        out.joint[static_cast<std::size_t>(ia) * nb + ib] += p;
        out.marg_a[ia] += p;
        out.marg_b[ib] += p;
    }
    out.values_a.resize(na);
    out.values_b.resize(nb);
    for (int i = 0; i < na; ++i) out.values_a[i] = side_value(i, na_bits, mode);
    for (int j = 0; j < nb; ++j) out.values_b[j] = side_value(j, nb_bits, mode);
    return out;
}

}  // namespace detail

struct SliceIndicators {
    std::string axes;
    double eps_tei = 0.0;
    double eps_ipr = 0.0;
    double eps_pcc = 0.0;
    double eps_bd = 0.0;
    bool pcc_degenerate = false;
};

struct IndicatorAverages {
    double xi_tei = 0.0;
    double xi_ipr = 0.0;
    double xi_pcc = 0.0;
    double xi_bd = 0.0;
};

struct ReducedAverages {
    std::vector<std::string> subset;
    IndicatorAverages averages;
};

struct IndicatorReport {
    std::vector<SliceIndicators> slices;
    IndicatorAverages averages;
    std::optional<ReducedAverages> reduced;
};

inline SliceIndicators slice_indicators(const std::string& axes, const std::vector<double>& probs, int n_qubits,
                                        const Bipartition& bp, PccSideValue mode = PccSideValue::CollectiveSum) {
    const auto cs = detail::composite_slice(probs, n_qubits, bp, mode);
    SliceIndicators out;
    out.axes = axes;
    out.eps_tei = eps_tei(cs.joint, cs.marg_a, cs.marg_b);
    out.eps_ipr = eps_ipr(cs.joint, cs.marg_a, cs.marg_b);
    const PccResult pcc = eps_pcc(cs.joint, cs.values_a, cs.values_b);
    out.eps_pcc = pcc.value;
    out.pcc_degenerate = pcc.degenerate;
    out.eps_bd = eps_bd(cs.joint, cs.marg_a, cs.marg_b);
    return out;
}

// Per-slice indicators plus arithmetic means over the included slice set.
// An empty `slice_subset` means every slice present in the tomogram; an
// explicitly requested slice must be present.
inline IndicatorReport average_indicators(const Tomogram& tom, const Bipartition& bipartition,
                                          const std::optional<std::vector<std::string>>& slice_subset = std::nullopt,
                                          PccSideValue mode = PccSideValue::CollectiveSum) {
    bipartition.validate(tom.n_qubits);
    std::vector<std::string> keys;
    if (slice_subset.has_value()) {
        if (slice_subset->empty()) throw std::invalid_argument("average_indicators: empty slice subset");
        std::string missing;
        for (const auto& k : *slice_subset) {
            if (!tom.has_slice(k)) missing += (missing.empty() ? "" : ",") + k;
        }
        if (!missing.empty()) {
            throw std::invalid_argument("average_indicators: slices absent from tomogram: " + missing);
        }
        keys = *slice_subset;
        std::sort(keys.begin(), keys.end());
    } else {
        for (const auto& [k, p] : tom.slices) keys.push_back(k);
    }

    IndicatorReport report;
    for (const auto& k : keys) {
        report.slices.push_back(slice_indicators(k, tom.slice(k), tom.n_qubits, bipartition, mode));
    }
    const double n = static_cast<double>(report.slices.size());
    for (const auto& s : report.slices) {
        report.averages.xi_tei += s.eps_tei / n;
        report.averages.xi_ipr += s.eps_ipr / n;
        report.averages.xi_pcc += s.eps_pcc / n;
        report.averages.xi_bd += s.eps_bd / n;
    }
    return report;
}

// The reduced-slice subset used for xi'_TEI: first-qubit axis in {x, y} for
// bipartite tomograms (the 6-slice set); no default reduction for N=3.
inline std::vector<std::string> default_reduced_subset(int n_qubits) {
    if (n_qubits != 2) return {};
    return {"xx", "xy", "xz", "yx", "yy", "yz"};
}

}  // namespace spintomo
