#include "cdrtime/exgaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "cdrtime/optimize.hpp"

namespace cdrtime {
namespace {

// Beyond this argument the erfc-based form loses its exponent to underflow.
constexpr double kAsymptoticArg = 25.0;

// Continued fraction u + (1/2)/(u + 1/(u + (3/2)/(u + ...))), equal to
// exp(-u^2) / (sqrt(pi) * erfc(u)). Converges quickly for large u.
double erfc_continued_fraction(double u) {
    constexpr double kTiny = 1e-300;
    double f = u;
    double c = f;
    double d = 0.0;
    for (int k = 1; k < 500; ++k) {
        const double a = 0.5 * k;
        d = u + a * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        d = 1.0 / d;
        c = u + a / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return f;
}

}  // namespace

void ExGaussianParams::validate() const {
    if (!std::isfinite(mu) || !std::isfinite(sigma) || !std::isfinite(tau) || !(sigma > 0.0) ||
        !(tau > 0.0)) {
        throw std::domain_error("invalid exGaussian parameters: mu=" + std::to_string(mu) +
                                " sigma=" + std::to_string(sigma) + " tau=" + std::to_string(tau));
    }
}

// log f(x) = -log(2 tau) + (mu - x)/tau + sigma^2/(2 tau^2) + log erfc(u),
// u = (mu + sigma^2/tau - x) / (sqrt(2) sigma). For large u the exponent and
// log erfc(u) ~ -u^2 cancel analytically, leaving a Gaussian-like kernel.
double exgaussian_log_pdf(double x, const ExGaussianParams& p) {
    p.validate();
    const double d = p.mu - x;
    const double u = (d + p.sigma * p.sigma / p.tau) / (std::numbers::sqrt2 * p.sigma);
    const double log_two_tau = std::log(2.0 * p.tau);
    if (u < kAsymptoticArg) {
        return -log_two_tau + d / p.tau + 0.5 * (p.sigma / p.tau) * (p.sigma / p.tau) +
               std::log(std::erfc(u));
    }
    return -log_two_tau - d * d / (2.0 * p.sigma * p.sigma) - 0.5 * std::log(std::numbers::pi) -
           std::log(erfc_continued_fraction(u));
}

double exgaussian_pdf(double x, const ExGaussianParams& params) {
    return std::exp(exgaussian_log_pdf(x, params));
}

double exgaussian_log_likelihood(std::span<const double> sample, const ExGaussianParams& params) {
    params.validate();
    double total = 0.0;
    for (double x : sample) total += exgaussian_log_pdf(x, params);
    return total;
}

ExGaussianParams exgaussian_moment_start(std::span<const double> sample) {
    const auto n = static_cast<double>(sample.size());
    double mean = 0.0;
    for (double x : sample) mean += x;
    mean /= n;
    double m2 = 0.0;
    double m3 = 0.0;
    for (double x : sample) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    const double s = std::sqrt(m2 / (n - 1.0));
    const double skew = (m3 / n) / std::pow(m2 / n, 1.5);

    const double tau = std::clamp(s * std::cbrt(skew / 2.0), 0.01 * s, 2.0 * s);
    const double sigma2 = std::max(s * s - tau * tau, 0.01 * s * s);
    return {mean - tau, std::sqrt(sigma2), tau};
}

ExGaussianFit fit_exgaussian(std::span<const double> sample, const FitOptions& options) {
    if (sample.size() < std::max<std::size_t>(options.min_samples, 2)) {
        throw FitError("exGaussian fit needs at least " + std::to_string(options.min_samples) +
                       " samples, got " + std::to_string(sample.size()));
    }
    if (!std::all_of(sample.begin(), sample.end(), [](double x) { return std::isfinite(x); })) {
        throw FitError("exGaussian fit: sample contains non-finite values");
    }
    const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
    if (*lo == *hi) {
        throw FitError("exGaussian fit: sample has zero variance");
    }

    ExGaussianFit fit;
    fit.n = sample.size();
    fit.initial = exgaussian_moment_start(sample);
    fit.initial_log_likelihood = exgaussian_log_likelihood(sample, fit.initial);

    const auto negative_loglik = [&](const std::vector<double>& theta) {
        const ExGaussianParams p{theta[0], std::exp(theta[1]), std::exp(theta[2])};
        if (!std::isfinite(p.sigma) || !std::isfinite(p.tau) || p.sigma <= 0.0 || p.tau <= 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        return -exgaussian_log_likelihood(sample, p);
    };

    const double scale = fit.initial.sigma + fit.initial.tau;
    SimplexOptions simplex;
    simplex.tolerance = options.tolerance;
    simplex.max_iterations = options.max_iterations;
    const auto best = nelder_mead(
        negative_loglik,
        {fit.initial.mu, std::log(fit.initial.sigma), std::log(fit.initial.tau)},
        {0.1 * scale, 0.2, 0.2}, simplex);

    fit.params = {best.point[0], std::exp(best.point[1]), std::exp(best.point[2])};
    fit.log_likelihood = -best.value;
    fit.iterations = best.iterations;
    fit.converged = best.converged;
    if (!std::isfinite(fit.log_likelihood)) {
        throw FitError("exGaussian fit: non-finite log-likelihood at optimum");
    }
    return fit;
}

}  // namespace cdrtime
