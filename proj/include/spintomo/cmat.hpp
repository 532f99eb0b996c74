#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace spintomo {

using cx = std::complex<double>;

// Dense complex matrix, row-major. Everything in this toolkit lives in
// dimensions <= 8x8, so no attempt is made at blocking or sparsity.
class CMat {
  public:
    CMat() = default;
    CMat(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
        if (rows < 1 || cols < 1) {
            throw std::invalid_argument("CMat: dimensions must be >= 1");
        }
    }

    static CMat zero(int rows, int cols) { return CMat(rows, cols); }

    static CMat identity(int n) {
        CMat m(n, n);
        for (int i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    cx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const cx& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<cx>& data() const { return a_; }

    CMat& operator+=(const CMat& o) {
        check_same_shape(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    CMat& operator-=(const CMat& o) {
        check_same_shape(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    CMat& operator*=(cx s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend CMat operator+(CMat a, const CMat& b) { return a += b; }
    friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
    friend CMat operator*(CMat a, cx s) { return a *= s; }
    friend CMat operator*(cx s, CMat a) { return a *= s; }

    friend CMat operator*(const CMat& a, const CMat& b) {
        if (a.cols_ != b.rows_) {
            throw std::invalid_argument("CMat: inner dimensions do not match");
        }
        CMat c(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i) {
            for (int k = 0; k < a.cols_; ++k) {
                const cx aik = a(i, k);
                if (aik == cx{}) continue;
                for (int j = 0; j < b.cols_; ++j) {
                    c(i, j) += aik * b(k, j);
                }
            }
        }
        return c;
    }

    std::vector<cx> apply(const std::vector<cx>& v) const {
        if (static_cast<int>(v.size()) != cols_) {
            throw std::invalid_argument("CMat: vector length does not match");
        }
        std::vector<cx> out(rows_);
        for (int i = 0; i < rows_; ++i) {
            cx s{};
            for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
            out[i] = s;
        }
        return out;
    }

    CMat adjoint() const {
        CMat m(cols_, rows_);
        for (int i = 0; i < rows_; ++i) {
            for (int j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
        }
        return m;
    }

    CMat transpose() const {
        CMat m(cols_, rows_);
        for (int i = 0; i < rows_; ++i) {
            for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
        }
        return m;
    }

    cx trace() const {
        require_square("trace");
        cx s{};
        for (int i = 0; i < rows_; ++i) s += (*this)(i, i);
        return s;
    }

    double frob_norm() const {
        double s = 0.0;
        for (const auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    bool all_finite() const {
        for (const auto& v : a_) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        }
        return true;
    }

    // Frobenius norm of (A - A^dagger); zero for Hermitian matrices.
    double asymmetry_norm() const {
        require_square("asymmetry_norm");
        double s = 0.0;
        for (int i = 0; i < rows_; ++i) {
            for (int j = 0; j < cols_; ++j) {
                s += std::norm((*this)(i, j) - std::conj((*this)(j, i)));
            }
        }
        return std::sqrt(s);
    }

    bool is_hermitian(double tol = 1e-10) const {
        return is_square() && asymmetry_norm() <= tol;
    }

    void require_square(const char* what) const {
        if (!is_square()) {
            throw std::invalid_argument(std::string(what) + ": matrix must be square");
        }
    }

  private:
    void check_same_shape(const CMat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw std::invalid_argument("CMat: shape mismatch");
        }
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<cx> a_;
};

inline double frob_distance(const CMat& a, const CMat& b) {
    CMat d = a;
    d -= b;
    return d.frob_norm();
}

// Half-spin operators (eigenvalues +-1/2) in the basis |down> -> 0, |up> -> 1.
// These are the quorum operators used everywhere downstream; the +-1 Pauli
// convention is never used for physics, only 2*sigma when a full Pauli is needed.
inline CMat sigma_x() {
    CMat m(2, 2);
    m(0, 1) = 0.5;
    m(1, 0) = 0.5;
    return m;
}

inline CMat sigma_y() {
    CMat m(2, 2);
    m(0, 1) = cx(0.0, 0.5);
    m(1, 0) = cx(0.0, -0.5);
    return m;
}

inline CMat sigma_z() {
    CMat m(2, 2);
    m(0, 0) = -0.5;
    m(1, 1) = 0.5;
    return m;
}

inline CMat identity2() { return CMat::identity(2); }

inline CMat kron(const CMat& a, const CMat& b) {
    CMat c(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            const cx aij = a(i, j);
            if (aij == cx{}) continue;
            for (int k = 0; k < b.rows(); ++k) {
                for (int l = 0; l < b.cols(); ++l) {
                    c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
                }
            }
        }
    }
    return c;
}

inline CMat kron(const std::vector<CMat>& factors) {
    if (factors.empty()) throw std::invalid_argument("kron: empty factor list");
    CMat out = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
    return out;
}

namespace detail {

inline void check_dims(const CMat& rho, const std::vector<int>& dims) {
    rho.require_square("partial operation");
    long prod = 1;
    for (int d : dims) {
        if (d < 1) throw std::invalid_argument("subsystem dimensions must be >= 1");
        prod *= d;
    }
    if (prod != rho.rows()) {
        throw std::invalid_argument("subsystem dimensions are inconsistent with the matrix dimension");
    }
}

// Mixed-radix digits of idx, most significant subsystem first (kron order).
inline void decompose(long idx, const std::vector<int>& dims, std::vector<int>& digits) {
    digits.resize(dims.size());
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        digits[k] = static_cast<int>(idx % dims[k]);
        idx /= dims[k];
    }
}

}  // namespace detail

// Trace out every subsystem not listed in `keep`; kept subsystems stay in
// their original relative order.
inline CMat partial_trace(const CMat& rho, const std::vector<int>& dims, const std::vector<int>& keep) {
    detail::check_dims(rho, dims);
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
    std::vector<int> keep_sorted = keep;
    std::sort(keep_sorted.begin(), keep_sorted.end());
    if (std::adjacent_find(keep_sorted.begin(), keep_sorted.end()) != keep_sorted.end()) {
        throw std::invalid_argument("partial_trace: duplicate keep index");
    }
    for (int k : keep_sorted) {
        if (k < 0 || k >= static_cast<int>(dims.size())) {
            throw std::invalid_argument("partial_trace: keep index out of range");
        }
    }
    std::vector<bool> kept(dims.size(), false);
    int dk = 1;
    for (int k : keep_sorted) {
        kept[k] = true;
        dk *= dims[k];
    }

    CMat out(dk, dk);
    const long d = rho.rows();
    std::vector<int> di, dj;
    for (long i = 0; i < d; ++i) {
        detail::decompose(i, dims, di);
        for (long j = 0; j < d; ++j) {
            detail::decompose(j, dims, dj);
            bool diag_on_traced = true;
            for (std::size_t s = 0; s < dims.size(); ++s) {
                if (!kept[s] && di[s] != dj[s]) {
                    diag_on_traced = false;
                    break;
                }
            }
            if (!diag_on_traced) continue;
            int oi = 0, oj = 0;
            for (int s : keep_sorted) {
                oi = oi * dims[s] + di[s];
                oj = oj * dims[s] + dj[s];
            }
            out(oi, oj) += rho(static_cast<int>(i), static_cast<int>(j));
        }
    }
    return out;
}

// Transpose the indices of exactly one subsystem.
inline CMat partial_transpose(const CMat& rho, const std::vector<int>& dims, int subsystem) {
    detail::check_dims(rho, dims);
    if (subsystem < 0 || subsystem >= static_cast<int>(dims.size())) {
        throw std::invalid_argument("partial_transpose: subsystem index out of range");
    }
    const long d = rho.rows();
    CMat out(rho.rows(), rho.cols());
    std::vector<int> di, dj;
    for (long i = 0; i < d; ++i) {
        detail::decompose(i, dims, di);
        for (long j = 0; j < d; ++j) {
            detail::decompose(j, dims, dj);
            std::vector<int> ri = di, rj = dj;
            std::swap(ri[subsystem], rj[subsystem]);
            long oi = 0, oj = 0;
            for (std::size_t s = 0; s < dims.size(); ++s) {
                oi = oi * dims[s] + ri[s];
                oj = oj * dims[s] + rj[s];
            }
            out(static_cast<int>(oi), static_cast<int>(oj)) = rho(static_cast<int>(i), static_cast<int>(j));
        }
    }
    return out;
}

// Reorder the tensor factors of a 2^n x 2^n matrix. new_order[k] gives the
// original qubit that ends up in slot k (slot 0 = most significant).
inline CMat permute_qubits(const CMat& rho, const std::vector<int>& new_order) {
    const int n = static_cast<int>(new_order.size());
    const int d = 1 << n;
    if (rho.rows() != d || rho.cols() != d) {
        throw std::invalid_argument("permute_qubits: dimension is not 2^n for the given order");
    }
    auto remap = [&](int idx) {
        int out = 0;
        for (int k = 0; k < n; ++k) {
            const int bit = (idx >> (n - 1 - new_order[k])) & 1;
            out |= bit << (n - 1 - k);
        }
        return out;
    };
    CMat out(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            out(remap(i), remap(j)) = rho(i, j);
        }
    }
    return out;
}

struct HermEigen {
    std::vector<double> eigenvalues;  // ascending
    CMat eigenvectors;                // unitary, columns are eigenvectors
};

// Cyclic Jacobi for Hermitian matrices. Plenty at 8x8; converges in a
// handful of sweeps. Off-diagonal Frobenius target 1e-12 (absolute), with a
// relative fallback for matrices of large norm.
inline HermEigen herm_eig(const CMat& h) {
    h.require_square("herm_eig");
    const double asym = h.asymmetry_norm();
    if (asym > 1e-10) {
        throw std::invalid_argument("herm_eig: input is not Hermitian (asymmetry norm " + std::to_string(asym) + ")");
    }
    const int n = h.rows();
    CMat a = h;
    // Symmetrize to kill representation round-off before iterating.
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const cx m = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = m;
        }
        a(i, i) = a(i, i).real();
    }
    CMat v = CMat::identity(n);

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) s += std::norm(a(i, j));
        return std::sqrt(s);
    };

    const double tol = std::max(1e-12, 1e-15 * a.frob_norm());
    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cx apq = a(p, q);
                const double r = std::abs(apq);
                if (r <= 1e-300) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const double alpha = a(p, p).real();
                const double beta = a(q, q).real();
                const cx phase = apq / r;
                const double tau = (alpha - beta) / (2.0 * r);
                double t;
                if (tau >= 0.0) {
                    t = -1.0 / (tau + std::sqrt(1.0 + tau * tau));
                } else {
                    t = 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const cx s = t * c * phase;

                // A <- G^dagger A G with G = I except
                // G(p,p)=c, G(p,q)=s, G(q,p)=-conj(s), G(q,q)=c.
                for (int k = 0; k < n; ++k) {
                    const cx akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - std::conj(s) * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const cx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = std::conj(s) * apk + c * aqk;
                }
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                a(p, q) = std::conj(a(q, p));
                for (int k = 0; k < n; ++k) {
                    const cx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - std::conj(s) * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

    HermEigen out;
    out.eigenvalues.resize(n);
    out.eigenvectors = CMat(n, n);
    for (int k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        for (int i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

// Exact unitary evolution rho -> e^{-iht} rho e^{+iht} via the
// eigendecomposition of h (hbar = 1, h in rad/s, t in s).
inline CMat evolve_matrix(const CMat& rho, const CMat& h, double t) {
    const HermEigen eig = herm_eig(h);
    const int n = h.rows();
    CMat u(n, n);
    for (int j = 0; j < n; ++j) {
        const cx ph = std::exp(cx(0.0, -eig.eigenvalues[j] * t));
        for (int i = 0; i < n; ++i) u(i, j) = eig.eigenvectors(i, j) * ph;
    }
    u = u * eig.eigenvectors.adjoint();
    return u * rho * u.adjoint();
}

}  // namespace spintomo
