#pragma once

// Small statistics toolbox for the verification checks: regularized
// incomplete gamma (chi-square tails), Kolmogorov-Smirnov distances against
// continuous laws, goodness-of-fit with cell pooling, total variation, and
// percentile-bootstrap confidence intervals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "aniwalk/rng.hpp"

namespace aniwalk {

inline double sample_mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("sample_mean: empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / double(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample_variance: need >= 2 points");
    const double m = sample_mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / double(xs.size() - 1);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double exponential_cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }

// Regularized upper incomplete gamma Q(a, x): power series below a+1,
// modified-Lentz continued fraction above.
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double del = 1.0 / a;
        double sum = del;
        for (int i = 0; i < 1000; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(log_prefix);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(log_prefix) * h;
}

inline double chi_square_pvalue(double statistic, double dof) {
    return gamma_q(dof / 2.0, statistic / 2.0);
}

struct ChiSquareResult {
    double statistic = 0.0;
    long long dof = 0;
    double p_value = 1.0;
    long long pooled_cells = 0;  // low-expectation cells merged into one bucket
};

// Pearson goodness of fit of observed counts against expected cell
// probabilities. Cells whose expected count falls below min_expected are
// pooled into a single bucket first.
inline ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                                      const std::vector<double>& expected_prob,
                                      double min_expected = 5.0) {
    if (observed.size() != expected_prob.size() || observed.empty())
        throw std::invalid_argument("chi_square_gof: size mismatch");
    double total = 0.0;
    for (double o : observed) total += o;

    ChiSquareResult res;
    double pool_obs = 0.0, pool_exp = 0.0;
    long long cells = 0;
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = expected_prob[i] * total;
        if (e < min_expected) {
            pool_obs += observed[i];
            pool_exp += e;
            ++res.pooled_cells;
            continue;
        }
        stat += (observed[i] - e) * (observed[i] - e) / e;
        ++cells;
    }
    if (pool_exp > 0.0) {
        stat += (pool_obs - pool_exp) * (pool_obs - pool_exp) / pool_exp;
        ++cells;
    }
    if (cells < 2) throw std::invalid_argument("chi_square_gof: fewer than 2 usable cells");
    res.statistic = stat;
    res.dof = cells - 1;
    res.p_value = chi_square_pvalue(stat, double(res.dof));
    return res;
}

// KS distance of an empirical sample against a continuous CDF.
template <class Cdf>
inline double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = double(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(double(i + 1) / n - f));
        d = std::max(d, std::abs(double(i) / n - f));
    }
    return d;
}

// KS distance of a lattice pmf (points ascending, matching masses) against a
// continuous CDF; the supremum is attained at the atoms, from either side.
template <class Cdf>
inline double ks_lattice(const std::vector<double>& points, const std::vector<double>& mass,
                         Cdf&& cdf) {
    if (points.size() != mass.size() || points.empty())
        throw std::invalid_argument("ks_lattice: size mismatch");
    double cum = 0.0;
    double d = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double f = cdf(points[i]);
        d = std::max(d, std::abs(cum - f));
        cum += mass[i];
        d = std::max(d, std::abs(cum - f));
    }
    return d;
}

// Total variation distance between two distributions given as key -> weight
// maps (weights need not be normalized; each side is normalized by its sum).
template <class K>
inline double total_variation(const std::map<K, double>& a, const std::map<K, double>& b) {
    double ta = 0.0, tb = 0.0;
    for (const auto& [k, v] : a) ta += v;
    for (const auto& [k, v] : b) tb += v;
    if (ta <= 0.0 || tb <= 0.0) throw std::invalid_argument("total_variation: empty distribution");
    double d = 0.0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            d += std::abs(ia->second / ta);
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            d += std::abs(ib->second / tb);
            ++ib;
        } else {
            d += std::abs(ia->second / ta - ib->second / tb);
            ++ia;
            ++ib;
        }
    }
    return 0.5 * d;
}

struct BootstrapCi {
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

namespace detail {
inline std::pair<double, double> percentile_bounds(std::vector<double>& stats, double conf) {
    std::sort(stats.begin(), stats.end());
    const double alpha = (1.0 - conf) / 2.0;
    const auto at = [&](double q) {
        const double pos = q * double(stats.size() - 1);
        const std::size_t i = static_cast<std::size_t>(pos);
        const double frac = pos - double(i);
        return i + 1 < stats.size() ? stats[i] * (1.0 - frac) + stats[i + 1] * frac : stats[i];
    };
    return {at(alpha), at(1.0 - alpha)};
}
}  // namespace detail

// Percentile bootstrap for the sample mean.
inline BootstrapCi bootstrap_mean_ci(const std::vector<double>& xs, int resamples,
                                     std::uint64_t seed, double conf = 0.95) {
    if (xs.empty() || resamples < 2) throw std::invalid_argument("bootstrap_mean_ci: bad input");
    SplitMix64 rng(seed);
    const std::size_t n = xs.size();
    std::vector<double> stats(static_cast<std::size_t>(resamples));
    for (auto& st : stats) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += xs[rng() % n];
        st = s / double(n);
    }
    BootstrapCi ci;
    ci.estimate = sample_mean(xs);
    std::tie(ci.lo, ci.hi) = detail::percentile_bounds(stats, conf);
    return ci;
}

// Percentile bootstrap for sum(num) / sum(den), resampling replica indices.
inline BootstrapCi bootstrap_sum_ratio_ci(const std::vector<double>& num,
                                          const std::vector<double>& den, int resamples,
                                          std::uint64_t seed, double conf = 0.95) {
    if (num.size() != den.size() || num.empty() || resamples < 2)
        throw std::invalid_argument("bootstrap_sum_ratio_ci: bad input");
    SplitMix64 rng(seed);
    const std::size_t n = num.size();
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        double sn = 0.0, sd = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = rng() % n;
            sn += num[k];
            sd += den[k];
        }
        if (sd > 0.0) stats.push_back(sn / sd);
    }
    if (stats.size() < 2) throw std::invalid_argument("bootstrap_sum_ratio_ci: degenerate resamples");
    double sn = 0.0, sd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sn += num[i];
        sd += den[i];
    }
    BootstrapCi ci;
    ci.estimate = sn / sd;
    std::tie(ci.lo, ci.hi) = detail::percentile_bounds(stats, conf);
    return ci;
}

}  // namespace aniwalk
