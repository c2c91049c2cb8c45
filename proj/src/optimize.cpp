#include "cdrtime/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cdrtime {
namespace {

double safe_eval(const std::function<double(const std::vector<double>&)>& f,
                 const std::vector<double>& x) {
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

struct Vertex {
    std::vector<double> x;
    double f;
};

// Affine combination a + t * (a - b).
std::vector<double> towards(const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (a[i] - b[i]);
    return out;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> start, const std::vector<double>& steps,
                          const SimplexOptions& options) {
    const std::size_t n = start.size();
    if (n == 0 || steps.size() != n) {
        throw std::invalid_argument("nelder_mead: start and steps must be non-empty and equal size");
    }

    SimplexResult result;
    result.point = start;
    result.value = safe_eval(objective, start);

    for (int round = 0; round <= options.restarts; ++round) {
        std::vector<Vertex> simplex;
        simplex.push_back({result.point, result.value});
        for (std::size_t i = 0; i < n; ++i) {
            auto x = result.point;
            x[i] += steps[i];
            simplex.push_back({x, safe_eval(objective, x)});
        }

        const double round_start = result.value;
        bool converged = false;
        while (result.iterations < options.max_iterations) {
            std::sort(simplex.begin(), simplex.end(),
                      [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
            if (std::isfinite(simplex.back().f) &&
                simplex.back().f - simplex.front().f < options.tolerance) {
                converged = true;
                break;
            }
            ++result.iterations;

            std::vector<double> centroid(n, 0.0);
            for (std::size_t v = 0; v < n; ++v) {
                for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i];
            }
            for (double& c : centroid) c /= static_cast<double>(n);

            Vertex& worst = simplex.back();
            const double second_worst = simplex[n - 1].f;

            Vertex reflected{towards(centroid, worst.x, 1.0), 0.0};
            reflected.f = safe_eval(objective, reflected.x);

            if (reflected.f < simplex.front().f) {
                Vertex expanded{towards(centroid, worst.x, 2.0), 0.0};
                expanded.f = safe_eval(objective, expanded.x);
                worst = expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
                continue;
            }
            if (reflected.f < second_worst) {
                worst = std::move(reflected);
                continue;
            }

            const bool outside = reflected.f < worst.f;
            Vertex contracted{outside ? towards(centroid, worst.x, 0.5)
                                      : towards(centroid, worst.x, -0.5),
                              0.0};
            contracted.f = safe_eval(objective, contracted.x);
            if (contracted.f < (outside ? reflected.f : worst.f)) {
                worst = std::move(contracted);
                continue;
            }

            const auto best = simplex.front().x;
            for (std::size_t v = 1; v <= n; ++v) {
                simplex[v].x = towards(best, simplex[v].x, -0.5);
                simplex[v].f = safe_eval(objective, simplex[v].x);
            }
        }

        const auto best = std::min_element(simplex.begin(), simplex.end(),
                                           [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        if (best->f < result.value) {
            result.point = best->x;
            result.value = best->f;
        }
        result.converged = converged;
        // A restart that gains less than the tolerance confirms the optimum.
        if (!converged || (round > 0 && round_start - result.value < options.tolerance)) break;
    }
    return result;
}

}  // namespace cdrtime
