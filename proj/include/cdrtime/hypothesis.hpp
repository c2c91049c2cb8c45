#pragma once

#include <cstddef>
#include <span>

namespace cdrtime {

struct KsResult {
    double d_statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_a = 0;
    std::size_t n_b = 0;

    bool operator==(const KsResult&) const = default;
};

struct FisherResult {
    double chi2 = 0.0;
    int dof = 0;
    double combined_p = 1.0;
    double index = 0.0;  // chi2 / dof; lower means more similar

    bool operator==(const FisherResult&) const = default;
};

/// Asymptotic Kolmogorov survival function
/// Q(lambda) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2), clamped to [0, 1].
double kolmogorov_survival(double lambda);

/// Two-sample KS test on ascending-sorted samples. The statistic is the exact
/// supremum of |F_a - F_b| (tie-correct sweep); the p-value is
/// kolmogorov_survival((sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) * d) with
/// ne = n_a n_b / (n_a + n_b). Throws std::domain_error on an empty or
/// unsorted sample.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Upper tail of the chi-square law, Q(dof/2, x/2). Throws std::domain_error
/// for x < 0, dof < 1 or NaN.
double chi_square_sf(double x, int dof);

/// Fisher's method over k p-values (each clamped to [1e-300, 1]). Throws
/// std::domain_error on an empty input or a value outside [0, 1].
FisherResult fisher_combine(std::span<const double> p_values);

}  // namespace cdrtime
