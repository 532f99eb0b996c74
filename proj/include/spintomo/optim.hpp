#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace spintomo {

// Golden-section minimisation on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo, double hi, double xtol = 1e-10,
                             int max_iter = 200) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Minimise f starting from an explicit simplex (dim+1 vertices). Stops when
// the simplex diameter drops below `diameter_tol`.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<std::vector<double>> simplex, double diameter_tol = 1e-7,
                                    int max_iter = 2000) {
    const std::size_t dim = simplex.front().size();
    if (simplex.size() != dim + 1) throw std::invalid_argument("nelder_mead: need dim+1 vertices");
    std::vector<double> fv(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) fv[i] = f(simplex[i]);

    auto diameter = [&]() {
        double d = 0.0;
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            for (std::size_t j = i + 1; j < simplex.size(); ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < dim; ++k) {
                    const double dd = simplex[i][k] - simplex[j][k];
                    s += dd * dd;
                }
                d = std::max(d, std::sqrt(s));
            }
        }
        return d;
    };

    NelderMeadResult res;
    int it = 0;
    for (; it < max_iter; ++it) {
        std::vector<std::size_t> order(simplex.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        {
            std::vector<std::vector<double>> s2;
            std::vector<double> f2;
            for (std::size_t i : order) {
                s2.push_back(simplex[i]);
                f2.push_back(fv[i]);
            }
            simplex = std::move(s2);
            fv = std::move(f2);
        }
        if (diameter() < diameter_tol) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i + 1 < simplex.size(); ++i) {
            for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / static_cast<double>(dim);
        }
        const std::vector<double>& worst = simplex.back();
        auto blend = [&](double t) {
            std::vector<double> x(dim);
            for (std::size_t k = 0; k < dim; ++k) x[k] = centroid[k] + t * (centroid[k] - worst[k]);
            return x;
        };

        const auto xr = blend(1.0);
        const double fr = f(xr);
        if (fr < fv.front()) {
            const auto xe = blend(2.0);
            const double fe = f(xe);
            if (fe < fr) {
                simplex.back() = xe;
                fv.back() = fe;
            } else {
                simplex.back() = xr;
                fv.back() = fr;
            }
        } else if (fr < fv[fv.size() - 2]) {
            simplex.back() = xr;
            fv.back() = fr;
        } else {
            const auto xc = blend(fr < fv.back() ? 0.5 : -0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fv.back())) {
                simplex.back() = xc;
                fv.back() = fc;
            } else {
                for (std::size_t i = 1; i < simplex.size(); ++i) {
                    for (std::size_t k = 0; k < dim; ++k) {
                        simplex[i][k] = simplex.front()[k] + 0.5 * (simplex[i][k] - simplex.front()[k]);
                    }
                    fv[i] = f(simplex[i]);
                }
            }
        }
    }
    res.x = simplex.front();
    res.value = fv.front();
    res.iterations = it;
    return res;
}

}  // namespace spintomo
