#pragma once

#include <functional>
#include <vector>

namespace cdrtime {

struct SimplexOptions {
    double tolerance = 1e-8;     // absolute spread of objective values across the simplex
    int max_iterations = 2000;   // shared by all restarts
    int restarts = 1;            // fresh simplex around the optimum after convergence
};

struct SimplexResult {
    std::vector<double> point;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free Nelder-Mead minimization (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). The initial simplex is `start` plus one
/// vertex per axis offset by `steps[i]`. The returned value never exceeds
/// objective(start).
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> start, const std::vector<double>& steps,
                          const SimplexOptions& options = {});

}  // namespace cdrtime
