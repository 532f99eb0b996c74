#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spintomo/cmat.hpp"
#include "spintomo/states.hpp"

namespace spintomo {

// Raised when input data (rather than a caller argument) violates an
// invariant, e.g. a noisy external tomogram with inconsistent marginals.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Axis { X, Y, Z };

inline char axis_char(Axis a) {
    switch (a) {
        case Axis::X: return 'x';
        case Axis::Y: return 'y';
        default: return 'z';
    }
}

inline Axis axis_from_char(char c) {
    switch (c) {
        case 'x': return Axis::X;
        case 'y': return Axis::Y;
        case 'z': return Axis::Z;
        default: throw std::invalid_argument(std::string("unknown axis label '") + c + "'");
    }
}

inline std::string axes_key(const std::vector<Axis>& axes) {
    std::string s;
    for (Axis a : axes) s.push_back(axis_char(a));
    return s;
}

inline std::vector<Axis> axes_from_key(const std::string& key) {
    std::vector<Axis> out;
    out.reserve(key.size());
    for (char c : key) out.push_back(axis_from_char(c));
    return out;
}

// All length-N axis tuples in lexicographic order (xx, xy, xz, yx, ...).
inline std::vector<std::string> all_axis_keys(int n_qubits) {
    std::vector<std::string> keys{""};
    for (int q = 0; q < n_qubits; ++q) {
        std::vector<std::string> next;
        next.reserve(keys.size() * 3);
        for (const auto& k : keys) {
            for (char c : {'x', 'y', 'z'}) next.push_back(k + c);
        }
        keys = std::move(next);
    }
    return keys;
}

// Measurement direction: an axis label or explicit (theta, phi) angles,
// resolved to the unit vector n = (sin t cos p, sin t sin p, cos t).
struct Direction {
    double theta = 0.0;
    double phi = 0.0;
    std::optional<Axis> axis;

    static Direction from_axis(Axis a) {
        Direction d;
        d.axis = a;
        switch (a) {
            case Axis::X: d.theta = std::numbers::pi / 2.0; d.phi = 0.0; break;
            case Axis::Y: d.theta = std::numbers::pi / 2.0; d.phi = std::numbers::pi / 2.0; break;
            case Axis::Z: d.theta = 0.0; d.phi = 0.0; break;
        }
        return d;
    }

    static Direction from_angles(double theta, double phi) {
        Direction d;
        d.theta = theta;
        d.phi = phi;
        return d;
    }

    std::array<double, 3> unit_vector() const {
        return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
    }
};

// The rotation taking |m> to the m-eigenstate of n.sigma. In the basis
// |down> -> 0, |up> -> 1 its columns label outcomes so that m = +1/2 always
// tags the +1/2 eigenvalue of n.sigma; no extra phase fix is required.
inline CMat rotation_u(double theta, double phi) {
    CMat u(2, 2);
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    const cx ep = std::exp(cx(0.0, phi / 2.0));
    const cx em = std::exp(cx(0.0, -phi / 2.0));
    u(0, 0) = c * ep;
    u(0, 1) = s * ep;
    u(1, 0) = -s * em;
    u(1, 1) = c * em;
    return u;
}

// Probability vector over outcomes m in {-1/2,+1/2}^N for one axis choice
// per qubit; entry for outcome bits b is <n,b| rho |n,b>.
inline std::vector<double> tomogram_slice(const DensityMatrix& rho, const std::vector<Direction>& dirs) {
    if (static_cast<int>(dirs.size()) != rho.n_qubits) {
        throw std::invalid_argument("tomogram_slice: need one direction per qubit");
    }
    CMat basis = rotation_u(dirs[0].theta, dirs[0].phi);
    for (std::size_t k = 1; k < dirs.size(); ++k) {
        basis = kron(basis, rotation_u(dirs[k].theta, dirs[k].phi));
    }
    const CMat conj = basis.adjoint() * rho.matrix * basis;
    const int d = conj.rows();
    std::vector<double> probs(d);
    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
        double p = conj(i, i).real();
        if (p < -1e-9 || p > 1.0 + 1e-9) {
            throw std::runtime_error("tomogram_slice: probability " + std::to_string(p) + " out of range");
        }
        p = std::min(1.0, std::max(0.0, p));
        probs[i] = p;
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::runtime_error("tomogram_slice: normalisation violated by " + std::to_string(std::abs(sum - 1.0)));
    }
    return probs;
}

// Map from axis tuple to outcome probabilities. Partial tomograms (fewer
// than 3^N slices) are first-class; consumers restrict to present slices.
struct Tomogram {
    int n_qubits = 0;
    std::map<std::string, std::vector<double>> slices;

    bool has_slice(const std::string& key) const { return slices.count(key) != 0; }

    const std::vector<double>& slice(const std::string& key) const {
        auto it = slices.find(key);
        if (it == slices.end()) throw std::invalid_argument("tomogram: missing slice " + key);
        return it->second;
    }

    bool is_full() const { return static_cast<int>(slices.size()) == pow3(n_qubits); }

    static int pow3(int n) {
        int p = 1;
        for (int i = 0; i < n; ++i) p *= 3;
        return p;
    }

    void insert_slice(const std::string& key, std::vector<double> probs, double norm_tol = 1e-9) {
        if (static_cast<int>(key.size()) != n_qubits) {
            throw std::invalid_argument("tomogram: axes string length != n_qubits");
        }
        axes_from_key(key);
        if (static_cast<int>(probs.size()) != (1 << n_qubits)) {
            throw std::invalid_argument("tomogram: slice length != 2^n");
        }
        double sum = 0.0;
        for (double& p : probs) {
            if (p < -1e-12 - norm_tol || p > 1.0 + 1e-12 + norm_tol) {
                throw DataError("tomogram: probability out of range in slice " + key);
            }
            p = std::min(1.0, std::max(0.0, p));
            sum += p;
        }
        if (std::abs(sum - 1.0) > norm_tol) {
            throw DataError("tomogram: slice " + key + " sums to " + std::to_string(sum));
        }
        slices[key] = std::move(probs);
    }
};

inline Tomogram full_tomogram(const DensityMatrix& rho) {
    if (rho.n_qubits > 3) throw std::invalid_argument("full_tomogram: supported for up to 3 qubits");
    Tomogram t;
    t.n_qubits = rho.n_qubits;
    for (const auto& key : all_axis_keys(rho.n_qubits)) {
        std::vector<Direction> dirs;
        for (char c : key) dirs.push_back(Direction::from_axis(axis_from_char(c)));
        t.slices[key] = tomogram_slice(rho, dirs);
    }
    return t;
}

// Reduced tomogram over `keep`. Every discarded-axis variant present in the
// input is marginalised; the variants must agree within `tol`, otherwise the
// input is reported as bad data (an inconsistent or noisy tomogram).
inline Tomogram marginal(const Tomogram& tom, const std::vector<int>& keep, double tol = 1e-9) {
    if (keep.empty()) throw std::invalid_argument("marginal: keep set must be nonempty");
    for (int q : keep) {
        if (q < 0 || q >= tom.n_qubits) throw std::invalid_argument("marginal: qubit index out of range");
    }
    for (std::size_t i = 1; i < keep.size(); ++i) {
        if (keep[i] <= keep[i - 1]) throw std::invalid_argument("marginal: keep must be strictly increasing");
    }
    const int n = tom.n_qubits;
    const int nk = static_cast<int>(keep.size());
    Tomogram out;
    out.n_qubits = nk;

    std::map<std::string, std::vector<std::vector<double>>> variants;
    for (const auto& [key, probs] : tom.slices) {
        std::string reduced_key;
        for (int q : keep) reduced_key.push_back(key[q]);
        std::vector<double> reduced(std::size_t(1) << nk, 0.0);
        for (int idx = 0; idx < (1 << n); ++idx) {
            int ridx = 0;
            for (int k = 0; k < nk; ++k) {
                ridx |= ((idx >> (n - 1 - keep[k])) & 1) << (nk - 1 - k);
            }
            reduced[ridx] += probs[idx];
        }
        variants[reduced_key].push_back(std::move(reduced));
    }

    for (const auto& [key, vs] : variants) {
        std::vector<double> mean(vs.front().size(), 0.0);
        for (const auto& v : vs) {
            for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
        }
        for (double& m : mean) m /= static_cast<double>(vs.size());
        for (const auto& v : vs) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (std::abs(v[i] - mean[i]) > tol) {
                    throw DataError("marginal: inconsistent reduced slice " + key + " across discarded-axis choices");
                }
            }
        }
        out.slices[key] = std::move(mean);
    }
    return out;
}

// <prod_i sigma_{q_i, a_i}> from the tomogram: sum_m (prod m_i) w(slice, m)
// over any slice matching the requested axes on the specified qubits.
inline double moment(const Tomogram& tom, const std::vector<std::pair<int, Axis>>& factors) {
    if (factors.empty()) return 1.0;
    std::vector<int> seen;
    for (const auto& [q, a] : factors) {
        (void)a;
        if (q < 0 || q >= tom.n_qubits) throw std::invalid_argument("moment: qubit index out of range");
        for (int s : seen) {
            if (s == q) throw std::invalid_argument("moment: at most one factor per qubit");
        }
        seen.push_back(q);
    }
    const std::vector<double>* probs = nullptr;
    for (const auto& [key, p] : tom.slices) {
        bool ok = true;
        for (const auto& [q, a] : factors) {
            if (key[q] != axis_char(a)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            probs = &p;
            break;
        }
    }
    if (probs == nullptr) {
        std::string want(tom.n_qubits, '*');
        for (const auto& [q, a] : factors) want[q] = axis_char(a);
        throw std::invalid_argument("moment: no slice matching " + want);
    }
    const int n = tom.n_qubits;
    double acc = 0.0;
    for (int idx = 0; idx < (1 << n); ++idx) {
        double m = 1.0;
        for (const auto& [q, a] : factors) {
            (void)a;
            m *= ((idx >> (n - 1 - q)) & 1) ? 0.5 : -0.5;
        }
        acc += m * (*probs)[idx];
    }
    return acc;
}

// <op> evaluated from tomogram moments alone, by expanding op over spin
// product strings: op = sum_s c_s prod sigma_{q,a}. Any Hermitian operator
// on N qubits reduces this way, which is what makes the tomographic route
// for squeezing possible without reconstructing rho.
inline double expectation_from_tomogram(const Tomogram& tom, const CMat& op) {
    const int n = tom.n_qubits;
    const int d = 1 << n;
    if (op.rows() != d || op.cols() != d) {
        throw std::invalid_argument("expectation_from_tomogram: operator dimension mismatch");
    }
    const CMat paulis[4] = {identity2(), 2.0 * sigma_x(), 2.0 * sigma_y(), 2.0 * sigma_z()};
    double acc = 0.0;
    std::vector<int> digits(n, 0);
    for (int code = 0; code < (1 << (2 * n)); ++code) {
        int c = code;
        CMat p = paulis[c & 3];
        digits[n - 1] = c & 3;
        c >>= 2;
        for (int q = n - 2; q >= 0; --q) {
            p = kron(paulis[c & 3], p);
            digits[q] = c & 3;
            c >>= 2;
        }
        const cx coeff = (p * op).trace() / static_cast<double>(d);
        if (std::abs(coeff) < 1e-14) continue;

        std::vector<std::pair<int, Axis>> factors;
        double scale = 1.0;
        for (int q = 0; q < n; ++q) {
            if (digits[q] == 0) continue;
            factors.push_back({q, static_cast<Axis>(digits[q] - 1)});
            scale *= 2.0;  // the string uses 2*sigma, moments use sigma
        }
        acc += coeff.real() * scale * moment(tom, factors);
    }
    return acc;
}

}  // namespace spintomo
