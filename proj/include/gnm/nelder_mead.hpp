#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace gnm {

struct NelderMeadOptions {
    int max_iterations = 400;
    double f_tolerance = 1e-10;
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

// Downhill simplex with the standard coefficients (reflect 1, expand 2,
// contract 0.5, shrink 0.5). Objective values that are NaN are treated as
// +inf. Fully deterministic: the vertex sort breaks ties by index.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    const std::vector<double>& x0,
                                    const std::vector<double>& step,
                                    const NelderMeadOptions& opt = {}) {
    const std::size_t d = x0.size();
    auto eval = [&](const std::vector<double>& x) {
        double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    std::vector<std::vector<double>> verts(d + 1, x0);
    for (std::size_t i = 0; i < d; ++i) verts[i + 1][i] += step[i];
    std::vector<double> fv(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fv[i] = eval(verts[i]);

    std::vector<std::size_t> order(d + 1);
    auto sort_vertices = [&]() {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };

    int iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        sort_vertices();
        const std::size_t best = order[0];
        const std::size_t worst = order[d];
        const std::size_t second_worst = order[d == 0 ? 0 : d - 1];

        if (std::isfinite(fv[best]) &&
            std::abs(fv[worst] - fv[best]) <= opt.f_tolerance * (std::abs(fv[best]) + 1e-12)) {
            break;
        }

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < d; ++k) centroid[k] += verts[i][k];
        }
        for (std::size_t k = 0; k < d; ++k) centroid[k] /= static_cast<double>(d);

        auto along = [&](double t) {
            std::vector<double> p(d);
            for (std::size_t k = 0; k < d; ++k) {
                p[k] = centroid[k] + t * (verts[worst][k] - centroid[k]);
            }
            return p;
        };

        auto reflected = along(-1.0);
        double fr = eval(reflected);
        if (fr < fv[best]) {
            auto expanded = along(-2.0);
            double fe = eval(expanded);
            if (fe < fr) {
                verts[worst] = std::move(expanded);
                fv[worst] = fe;
            } else {
                verts[worst] = std::move(reflected);
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second_worst]) {
            verts[worst] = std::move(reflected);
            fv[worst] = fr;
            continue;
        }
        auto contracted = along(fr < fv[worst] ? -0.5 : 0.5);
        double fc = eval(contracted);
        if (fc < std::min(fr, fv[worst])) {
            verts[worst] = std::move(contracted);
            fv[worst] = fc;
            continue;
        }
        // shrink toward the best vertex
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < d; ++k) {
                verts[i][k] = verts[best][k] + 0.5 * (verts[i][k] - verts[best][k]);
            }
            fv[i] = eval(verts[i]);
        }
    }

    sort_vertices();
    NelderMeadResult result;
    result.x = verts[order[0]];
    result.fx = fv[order[0]];
    result.iterations = iter;
    return result;
}

}  // namespace gnm
