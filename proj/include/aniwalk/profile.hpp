#pragma once

// Step-probability profiles p_j for the anisotropic walk on Z^2, and the
// averaged quantities derived from them: gamma, gamma* = (gamma-1)/gamma,
// the one-sided prefix averages kappa_j / beta_j, and the fitted decay
// exponent eta of the two-sided Cesaro averages of 1/p_j.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aniwalk {

struct ProfileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Table profile whose two tail values differ: the two one-sided averages of
// 1/p_j converge to different limits, so gamma does not exist.
struct AsymmetricTails : ProfileError {
    using ProfileError::ProfileError;
};

// The two one-sided Cesaro averages disagree beyond tolerance at n_max.
struct SidesDisagree : ProfileError {
    using ProfileError::ProfileError;
};

// Raised by checks whose normalizing constant needs gamma > 1.
struct GammaNotAboveOne : ProfileError {
    using ProfileError::ProfileError;
};

enum class ProfileKind { Uniform, Periodic, Table };

// The map j -> p_j defining the walk: at a site on line y = j the walk steps
// to either vertical neighbor with probability p_j and to either horizontal
// neighbor with probability 1/2 - p_j.
//
// Valid entries satisfy 0 < p_j <= 1/2 and p_j >= omega > 0. A profile with
// all p_j = 1/2 is the degenerate one-dimensional walk; it is constructible
// (some cross-checks want it) but flagged via warnings().
class StepProfile {
  public:
    static StepProfile uniform(double p, std::optional<double> omega = {}) {
        StepProfile sp;
        sp.kind_ = ProfileKind::Uniform;
        sp.values_ = {p};
        sp.finish(omega);
        return sp;
    }

    // p_j = table[j mod L], L = table.size().
    static StepProfile periodic(std::vector<double> table, std::optional<double> omega = {}) {
        if (table.empty()) throw ProfileError("periodic profile needs a non-empty table");
        StepProfile sp;
        sp.kind_ = ProfileKind::Periodic;
        sp.values_ = std::move(table);
        sp.finish(omega);
        return sp;
    }

    // Explicit values on the window [window_min, window_min + values.size()),
    // constant tails beyond it: tail_pos for larger j, tail_neg for smaller.
    static StepProfile table(long long window_min, std::vector<double> values, double tail_pos,
                             double tail_neg, std::optional<double> omega = {}) {
        if (values.empty()) throw ProfileError("table profile needs a non-empty window");
        StepProfile sp;
        sp.kind_ = ProfileKind::Table;
        sp.values_ = std::move(values);
        sp.window_min_ = window_min;
        sp.tail_pos_ = tail_pos;
        sp.tail_neg_ = tail_neg;
        sp.finish(omega);
        return sp;
    }

    ProfileKind kind() const noexcept { return kind_; }

    double p_at(long long j) const noexcept {
        switch (kind_) {
            case ProfileKind::Uniform:
                return values_[0];
            case ProfileKind::Periodic: {
                const long long L = static_cast<long long>(values_.size());
                long long r = j % L;
                if (r < 0) r += L;
                return values_[static_cast<std::size_t>(r)];
            }
            case ProfileKind::Table:
            default: {
                const long long off = j - window_min_;
                if (off < 0) return tail_neg_;
                if (off >= static_cast<long long>(values_.size())) return tail_pos_;
                return values_[static_cast<std::size_t>(off)];
            }
        }
    }

    // alpha_j = 2 p_j, the success probability of the horizontal-run
    // geometric law at level j.
    double alpha_at(long long j) const noexcept { return 2.0 * p_at(j); }

    double omega() const noexcept { return omega_; }
    double min_p() const noexcept { return min_p_; }

    // Uniform: {p}. Periodic: the period table. Table: the window values.
    const std::vector<double>& values() const noexcept { return values_; }
    long long period() const noexcept { return static_cast<long long>(values_.size()); }
    long long window_min() const noexcept { return window_min_; }
    double tail_pos() const noexcept { return tail_pos_; }
    double tail_neg() const noexcept { return tail_neg_; }

    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        if (min_p_ >= 0.5)
            w.push_back("degenerate profile: all p_j = 1/2 (walk lives on the y axis)");
        return w;
    }

  private:
    void finish(std::optional<double> omega) {
        double lo = std::numeric_limits<double>::infinity();
        for (double p : values_) {
            if (!(p > 0.0) || p > 0.5)
                throw ProfileError("step probability out of range (0, 1/2]: " + std::to_string(p));
            lo = std::min(lo, p);
        }
        if (kind_ == ProfileKind::Table) {
            for (double p : {tail_pos_, tail_neg_}) {
                if (!(p > 0.0) || p > 0.5)
                    throw ProfileError("tail probability out of range (0, 1/2]: " +
                                       std::to_string(p));
                lo = std::min(lo, p);
            }
        }
        min_p_ = lo;
        omega_ = omega.value_or(lo);
        if (!(omega_ > 0.0) || omega_ > lo + 1e-15)
            throw ProfileError("omega must satisfy 0 < omega <= inf_j p_j");
    }

    ProfileKind kind_ = ProfileKind::Uniform;
    std::vector<double> values_;
    long long window_min_ = 0;
    double tail_pos_ = 0.5;
    double tail_neg_ = 0.5;
    double omega_ = 0.0;
    double min_p_ = 0.5;
};

inline double p_at(const StepProfile& prof, long long j) { return prof.p_at(j); }

// Exact value of gamma, the half-limit of n^-1 sum_{j<=n} 1/p_{+-j}.
// Uniform(p): 1/(2p). Periodic: (1/2L) sum 1/p_j. Table with equal tails:
// 1/(2 p_tail), the Cesaro limit being governed by the tail alone.
inline double gamma_of(const StepProfile& prof) {
    switch (prof.kind()) {
        case ProfileKind::Uniform:
            return 1.0 / (2.0 * prof.values()[0]);
        case ProfileKind::Periodic: {
            double s = 0.0;
            for (double p : prof.values()) s += 1.0 / p;
            return s / (2.0 * static_cast<double>(prof.period()));
        }
        case ProfileKind::Table:
        default: {
            if (prof.tail_pos() != prof.tail_neg())
                throw AsymmetricTails(
                    "table tails differ; the two one-sided averages have different limits");
            return 1.0 / (2.0 * prof.tail_pos());
        }
    }
}

inline double gamma_star_of(const StepProfile& prof) {
    const double g = gamma_of(prof);
    return (g - 1.0) / g;
}

struct HeydeRow {
    long long n = 0;
    double avg_pos = 0.0;  // n^-1 sum_{j=1..n} 1/p_j
    double avg_neg = 0.0;  // n^-1 sum_{j=1..n} 1/p_-j
};

struct HeydeResult {
    double gamma_hat = 0.0;
    // Fitted decay exponent of |average - 2 gamma_hat| ~ c n^-eta, clamped to
    // [0, inf); +inf when the residuals vanish identically (e.g. uniform).
    double eta_hat = 0.0;
    std::vector<HeydeRow> residual_table;
};

// Finite-n version of the two-sided averaging condition: computes both
// one-sided averages up to n_max, estimates gamma from their common value at
// n_max and eta from a log-log fit over the upper half of the range.
inline HeydeResult check_heyde(const StepProfile& prof, long long n_max,
                               double side_tolerance = 1e-3) {
    if (n_max < 100) throw std::invalid_argument("check_heyde needs n_max >= 100");
    HeydeResult res;
    res.residual_table.reserve(static_cast<std::size_t>(n_max));
    double sum_pos = 0.0, sum_neg = 0.0;
    for (long long n = 1; n <= n_max; ++n) {
        sum_pos += 1.0 / prof.p_at(n);
        sum_neg += 1.0 / prof.p_at(-n);
        res.residual_table.push_back({n, sum_pos / double(n), sum_neg / double(n)});
    }
    const HeydeRow& last = res.residual_table.back();
    res.gamma_hat = 0.25 * (last.avg_pos + last.avg_neg);

    const double rel_gap = std::abs(last.avg_pos - last.avg_neg) /
                           std::max(1e-300, std::abs(last.avg_pos + last.avg_neg) / 2.0);
    if (rel_gap > side_tolerance)
        throw SidesDisagree("one-sided averages disagree at n_max: " +
                            std::to_string(last.avg_pos) + " vs " + std::to_string(last.avg_neg));

    // Least-squares slope of log|avg - 2 gamma_hat| against -log n over the
    // upper half of the range; exact-zero residuals carry no information.
    const double two_gamma = 2.0 * res.gamma_hat;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long long count = 0;
    for (long long n = n_max / 2; n <= n_max; ++n) {
        const HeydeRow& row = res.residual_table[static_cast<std::size_t>(n - 1)];
        const double resid =
            std::max(std::abs(row.avg_pos - two_gamma), std::abs(row.avg_neg - two_gamma));
        if (resid <= 0.0) continue;
        const double x = -std::log(double(n));
        const double y = std::log(resid);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2) {
        res.eta_hat = std::numeric_limits<double>::infinity();
    } else {
        const double denom = double(count) * sxx - sx * sx;
        const double slope = (double(count) * sxy - sx * sy) / denom;
        res.eta_hat = std::max(0.0, slope);
    }
    return res;
}

struct KappaBeta {
    std::vector<double> kappa;  // kappa[j-1] = (1/j) sum_{k=1..j} 1/p_k
    std::vector<double> beta;   // beta[j-1]  = (1/j) sum_{k=1..j} 1/p_-k
};

inline KappaBeta kappa_beta(const StepProfile& prof, long long j_max) {
    if (j_max < 1) throw std::invalid_argument("kappa_beta needs j_max >= 1");
    KappaBeta kb;
    kb.kappa.reserve(static_cast<std::size_t>(j_max));
    kb.beta.reserve(static_cast<std::size_t>(j_max));
    double sk = 0.0, sb = 0.0;
    for (long long j = 1; j <= j_max; ++j) {
        sk += 1.0 / prof.p_at(j);
        sb += 1.0 / prof.p_at(-j);
        kb.kappa.push_back(sk / double(j));
        kb.beta.push_back(sb / double(j));
    }
    return kb;
}

struct ProfileDiagnostics {
    double gamma = 0.0;
    double gamma_star = 0.0;    // (gamma-1)/gamma, the limiting horizontal step fraction
    double sigma = 0.0;         // 1/sqrt(gamma), the CLT scale of C2
    double mu_local_limit = 0.0;   // 2 gamma
    double omega = 0.0;
    double eta_estimate = 0.0;
    std::vector<double> kappa_seq;
    std::vector<double> beta_seq;
    std::vector<std::string> warnings;
};

inline ProfileDiagnostics diagnostics(const StepProfile& prof, long long n_max = 10000,
                                      long long j_max = 64) {
    ProfileDiagnostics d;
    d.gamma = gamma_of(prof);
    d.gamma_star = (d.gamma - 1.0) / d.gamma;
    d.sigma = 1.0 / std::sqrt(d.gamma);
    d.mu_local_limit = 2.0 * d.gamma;
    d.omega = prof.omega();
    d.warnings = prof.warnings();
    if (d.gamma <= 1.0)
        d.warnings.push_back("gamma <= 1: the return-probability asymptotics need gamma > 1");
    const HeydeResult hr = check_heyde(prof, std::max<long long>(n_max, 100));
    d.eta_estimate = hr.eta_hat;
    const KappaBeta kb = kappa_beta(prof, j_max);
    d.kappa_seq = kb.kappa;
    d.beta_seq = kb.beta;
    return d;
}

}  // namespace aniwalk
