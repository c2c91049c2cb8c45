#include "cdrtime/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cdrtime {
namespace {

constexpr double kMinP = 1e-300;

void check_sample(std::span<const double> s, const char* name) {
    if (s.empty()) {
        throw std::domain_error(std::string("ks_two_sample: sample ") + name + " is empty");
    }
    if (std::any_of(s.begin(), s.end(), [](double x) { return std::isnan(x); })) {
        throw std::domain_error(std::string("ks_two_sample: sample ") + name + " contains NaN");
    }
    if (!std::is_sorted(s.begin(), s.end())) {
        throw std::domain_error(std::string("ks_two_sample: sample ") + name + " is not sorted");
    }
}

// log Gamma(dof / 2). Exact product form for the half-integer arguments that
// chi-square needs; avoids std::lgamma's global signgam.
double log_gamma_half(int dof) {
    if (dof > 2000) return std::lgamma(0.5 * dof);
    double acc = (dof % 2 == 0) ? 0.0 : 0.5 * std::log(std::numbers::pi);
    // Gamma(a) = (a-1)(a-2)...(a0) Gamma(a0), a0 = 1 or 1/2.
    for (double k = (dof % 2 == 0) ? 1.0 : 0.5; k < 0.5 * dof - 0.25; k += 1.0) {
        acc += std::log(k);
    }
    return acc;
}

// Lower regularized gamma P(a, y) by its power series.
double gamma_p_series(double a, double y, double log_gamma_a) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= y / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    return sum * std::exp(-y + a * std::log(y) - log_gamma_a);
}

// Upper regularized gamma Q(a, y) by continued fraction (modified Lentz).
double gamma_q_continued_fraction(double a, double y, double log_gamma_a) {
    constexpr double kTiny = 1e-300;
    double b = y + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-y + a * std::log(y) - log_gamma_a) * h;
}

}  // namespace

double kolmogorov_survival(double lambda) {
    if (!(lambda > 0.0)) return 1.0;
    if (lambda < 0.2) {
        // Complementary theta-function form; the alternating series needs
        // O(1/lambda) terms here. 1 - Q < 1e-12 on this range.
        double k = 0.0;
        for (int j = 1; j < 50; ++j) {
            const double m = 2.0 * j - 1.0;
            const double term =
                std::exp(-m * m * std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
            k += term;
            if (term < 1e-300) break;
        }
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * k, 0.0, 1.0);
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j < 1000; ++j) {
        const double term = 2.0 * sign * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::fabs(term) < 1e-12) break;
        sign = -sign;
    }
    return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    check_sample(a, "a");
    check_sample(b, "b");

    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }

    const double ne = na * nb / (na + nb);
    const double root = std::sqrt(ne);
    const double lambda = (root + 0.12 + 0.11 / root) * d;
    return {d, kolmogorov_survival(lambda), a.size(), b.size()};
}

double chi_square_sf(double x, int dof) {
    if (std::isnan(x) || x < 0.0 || dof < 1) {
        throw std::domain_error("chi_square_sf: need x >= 0 and dof >= 1 (x=" + std::to_string(x) +
                                ", dof=" + std::to_string(dof) + ")");
    }
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    const double a = 0.5 * dof;
    const double y = 0.5 * x;
    const double lg = log_gamma_half(dof);
    const double q = x < dof + 1.0 ? 1.0 - gamma_p_series(a, y, lg)
                                   : gamma_q_continued_fraction(a, y, lg);
    return std::clamp(q, 0.0, 1.0);
}

FisherResult fisher_combine(std::span<const double> p_values) {
    if (p_values.empty()) {
        throw std::domain_error("fisher_combine: no p-values");
    }
    double sum = 0.0;
    for (double p : p_values) {
        if (std::isnan(p) || p < 0.0 || p > 1.0) {
            throw std::domain_error("fisher_combine: p-value outside [0, 1]: " + std::to_string(p));
        }
        sum += -std::log(std::max(p, kMinP));
    }
    FisherResult r;
    r.chi2 = 2.0 * sum;
    r.dof = 2 * static_cast<int>(p_values.size());
    r.combined_p = chi_square_sf(r.chi2, r.dof);
    r.index = r.chi2 / r.dof;
    return r;
}

}  // namespace cdrtime
