#pragma once

#include <span>
#include <stdexcept>

namespace cdrtime {

/// Exponentially modified normal law: the sum of Normal(mu, sigma^2) and an
/// independent exponential with mean tau. All three are in seconds.
struct ExGaussianParams {
    double mu = 0.0;
    double sigma = 1.0;
    double tau = 1.0;

    double mean() const { return mu + tau; }
    double variance() const { return sigma * sigma + tau * tau; }

    /// Throws std::domain_error unless sigma > 0, tau > 0 and all are finite.
    void validate() const;
};

double exgaussian_log_pdf(double x, const ExGaussianParams& params);
double exgaussian_pdf(double x, const ExGaussianParams& params);
double exgaussian_log_likelihood(std::span<const double> sample, const ExGaussianParams& params);

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMinFitSamples = 50;

struct FitOptions {
    std::size_t min_samples = kMinFitSamples;
    double tolerance = 1e-8;  // log-likelihood units
    int max_iterations = 2000;
};

struct ExGaussianFit {
    ExGaussianParams params;
    double log_likelihood = 0.0;
    ExGaussianParams initial;
    double initial_log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
    std::size_t n = 0;
};

/// Method-of-moments starting point: tau from the sample skewness, clamped to
/// [0.01 s, 2 s]; mu = mean - tau; sigma^2 = max(s^2 - tau^2, (0.1 s)^2).
ExGaussianParams exgaussian_moment_start(std::span<const double> sample);

/// Maximum-likelihood fit by simplex search in (mu, log sigma, log tau),
/// seeded with exgaussian_moment_start. Throws FitError for samples smaller
/// than options.min_samples, with zero variance or non-finite values, or when
/// the optimum has a non-finite log-likelihood.
ExGaussianFit fit_exgaussian(std::span<const double> sample, const FitOptions& options = {});

}  // namespace cdrtime
