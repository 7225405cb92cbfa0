#pragma once

// Exact finite-step distributions of the anisotropic walk.
//
// Two dynamic programs share one idea: the vertical coordinate C2 is a lazy
// birth-death chain (hold probability 1 - 2 p_j), and conditionally on the
// number of horizontal steps h the horizontal displacement is an independent
// simple walk. The joint DP therefore tracks (level j, horizontal count h)
// instead of a full 2-D position grid, and the origin return probability is
// recovered as sum_h mass(0, h) * P(SSRW(h) = 0).
//
// Both sweeps truncate |j| at a cap and account every escaped unit of mass
// in an explicit loss ledger; nothing is renormalized.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aniwalk/profile.hpp"

namespace aniwalk {

// Truncation loss above this is an error: results would no longer carry the
// documented accuracy bound.
inline constexpr double kTruncLossLimit = 1e-9;

struct CapTooSmall : std::runtime_error {
    CapTooSmall(double loss, int cap)
        : std::runtime_error("truncation loss " + std::to_string(loss) + " exceeds " +
                             std::to_string(kTruncLossLimit) + " at level cap " +
                             std::to_string(cap) + "; rerun with a larger cap"),
          loss(loss),
          cap(cap) {}
    double loss;
    int cap;
};

struct TooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// AUTO cap: 4 sqrt(n ln n), clamped to [1, n]. Mass beyond that level is
// super-polynomially small in n and lands in the loss ledger anyway.
inline int auto_level_cap(long long n) {
    if (n <= 1) return 1;
    const double x = 4.0 * std::sqrt(double(n) * std::log(double(n)));
    const long long cap = std::min<long long>(n, static_cast<long long>(std::ceil(x)));
    return static_cast<int>(std::max<long long>(1, cap));
}

// P(SSRW(h) = 0) = C(h, h/2) 2^-h for even h, 0 for odd h. Exact product for
// small h, Stirling-series tail for large h; relative error stays below
// 1e-12 over the whole range, O(1) access for large h.
inline double ssrw_return(long long h) {
    if (h < 0) throw std::invalid_argument("ssrw_return: h must be >= 0");
    if (h & 1) return 0.0;
    const long long m = h / 2;
    if (m == 0) return 1.0;
    if (m < 512) {
        double p = 1.0;
        for (long long k = 1; k <= m; ++k) p *= double(2 * k - 1) / double(2 * k);
        return p;
    }
    const double x = double(m);
    const double series = 1.0 - 1.0 / (8.0 * x) + 1.0 / (128.0 * x * x) +
                          5.0 / (1024.0 * x * x * x) - 21.0 / (32768.0 * x * x * x * x);
    return series / std::sqrt(std::numbers::pi * x);
}

// For the isotropic walk (p = 1/4) the two diagonal projections are
// independent simple walks, so the return probability factorizes exactly.
inline double isotropic_return_prob(long long two_n) {
    if (two_n & 1) return 0.0;
    const double b = ssrw_return(two_n);
    return b * b;
}

// Law of the vertical coordinate C2(n) on [-cap, cap], plus the full
// sequence of origin probabilities P(C2(m) = 0), m = 0..n.
struct VerticalPmf {
    long long n = 0;
    int cap = 0;
    double trunc_loss = 0.0;
    std::vector<double> mass;        // index j + cap
    std::vector<double> origin_seq;  // origin_seq[m] = P(C2(m) = 0)

    double mass_at(long long j) const {
        if (j < -cap || j > cap) return 0.0;
        return mass[static_cast<std::size_t>(j + cap)];
    }
    double total_mass() const {
        double s = 0.0;
        for (double v : mass) s += v;
        return s;
    }
};

// One lazy-chain sweep: new(j) = old(j)(1-2p_j) + old(j-1)p_{j-1} + old(j+1)p_{j+1}.
inline VerticalPmf vertical_evolve(const StepProfile& prof, long long n,
                                   std::optional<int> level_cap = {}) {
    if (n < 0) throw std::invalid_argument("vertical_evolve: n must be >= 0");
    const int cap = level_cap ? *level_cap : auto_level_cap(n);
    if (cap < 1) throw std::invalid_argument("vertical_evolve: level_cap must be >= 1");

    // One zero pad cell on each side keeps the stencil branch-free.
    const std::size_t size = 2 * std::size_t(cap) + 3;
    const std::size_t origin = std::size_t(cap) + 1;
    std::vector<double> p(size, 0.0), hold(size, 0.0);
    for (std::size_t i = 1; i + 1 < size; ++i) {
        p[i] = prof.p_at(static_cast<long long>(i) - cap - 1);
        hold[i] = 1.0 - 2.0 * p[i];
    }

    std::vector<double> cur(size, 0.0), nxt(size, 0.0);
    cur[origin] = 1.0;

    VerticalPmf out;
    out.n = n;
    out.cap = cap;
    out.origin_seq.reserve(static_cast<std::size_t>(n) + 1);
    out.origin_seq.push_back(1.0);

    double loss = 0.0;
    for (long long m = 1; m <= n; ++m) {
        const long long w = std::min<long long>(m, cap);
        const std::size_t lo = origin - static_cast<std::size_t>(w);
        const std::size_t hi = origin + static_cast<std::size_t>(w);
        if (m - 1 >= cap) {
            loss += cur[1] * p[1] + cur[size - 2] * p[size - 2];
            if (loss > kTruncLossLimit) throw CapTooSmall(loss, cap);
        }
        for (std::size_t i = lo; i <= hi; ++i)
            nxt[i] = cur[i] * hold[i] + cur[i - 1] * p[i - 1] + cur[i + 1] * p[i + 1];
        cur.swap(nxt);
        out.origin_seq.push_back(cur[origin]);
    }

    out.trunc_loss = loss;
    out.mass.assign(cur.begin() + 1, cur.end() - 1);
    return out;
}

// Joint law of (level j, horizontal step count h) after n steps.
struct JointPmf {
    long long n = 0;
    int cap = 0;
    double trunc_loss = 0.0;
    std::vector<double> mass;  // (j + cap) * (n + 1) + h

    double mass_at(long long j, long long h) const {
        if (j < -cap || j > cap || h < 0 || h > n) return 0.0;
        return mass[static_cast<std::size_t>(j + cap) * static_cast<std::size_t>(n + 1) +
                    static_cast<std::size_t>(h)];
    }
    double total_mass() const {
        double s = 0.0;
        for (double v : mass) s += v;
        return s;
    }
    std::vector<double> vertical_marginal() const {
        std::vector<double> vm(2 * std::size_t(cap) + 1, 0.0);
        const std::size_t w = static_cast<std::size_t>(n + 1);
        for (std::size_t r = 0; r < vm.size(); ++r)
            for (std::size_t h = 0; h < w; ++h) vm[r] += mass[r * w + h];
        return vm;
    }
    double expected_h() const {
        double s = 0.0;
        const std::size_t w = static_cast<std::size_t>(n + 1);
        for (std::size_t r = 0; r < 2 * std::size_t(cap) + 1; ++r)
            for (std::size_t h = 1; h < w; ++h) s += double(h) * mass[r * w + h];
        return s;
    }
};

namespace detail {

// Shared joint sweep. Rows are levels (padded by one zero row each side),
// columns are horizontal counts. Each step writes rows independently from
// the previous buffer, so the row loop parallelizes without changing a bit
// of the output. Row j is written out to its reachable count m - |j| plus a
// two-cell zero margin; reads never pass the margin.
template <class PerStep>
inline double joint_sweep(const StepProfile& prof, long long n, int cap, PerStep&& per_step,
                          std::vector<double>* final_grid) {
    const std::size_t rows = 2 * std::size_t(cap) + 3;
    const std::size_t width = static_cast<std::size_t>(n) + 1;
    const long long origin_row = cap + 1;

    std::vector<double> p(rows, 0.0), hold(rows, 0.0);
    for (std::size_t i = 1; i + 1 < rows; ++i) {
        p[i] = prof.p_at(static_cast<long long>(i) - cap - 1);
        hold[i] = 1.0 - 2.0 * p[i];
    }

    std::vector<double> cur(rows * width, 0.0), nxt(rows * width, 0.0);
    cur[static_cast<std::size_t>(origin_row) * width] = 1.0;
    per_step(0, cur.data() + static_cast<std::size_t>(origin_row) * width, 0.0);

    double loss = 0.0;
    for (long long m = 1; m <= n; ++m) {
        const long long w = std::min<long long>(m, cap);
        if (m - 1 >= cap) {
            const double* top = cur.data() + static_cast<std::size_t>(origin_row + cap) * width;
            const double* bot = cur.data() + static_cast<std::size_t>(origin_row - cap) * width;
            double esc = 0.0;
            for (long long h = 0; h <= m - 1 - cap; ++h) esc += top[h] * p[rows - 2] + bot[h] * p[1];
            loss += esc;
            if (loss > kTruncLossLimit) throw CapTooSmall(loss, cap);
        }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (long long j = -w; j <= w; ++j) {
            const std::size_t row = static_cast<std::size_t>(origin_row + j);
            double* out = nxt.data() + row * width;
            const double* mid = cur.data() + row * width;
            const double* below = mid - width;
            const double* above = mid + width;
            const double hj = hold[row];
            const double pd = p[row - 1];
            const double pu = p[row + 1];
            const long long hmax = m - std::llabs(j);
            out[0] = pd * below[0] + pu * above[0];
            for (long long h = 1; h <= hmax; ++h)
                out[h] = hj * mid[h - 1] + pd * below[h] + pu * above[h];
            if (hmax + 1 < static_cast<long long>(width)) out[hmax + 1] = 0.0;
            if (hmax + 2 < static_cast<long long>(width)) out[hmax + 2] = 0.0;
        }
        cur.swap(nxt);
        per_step(m, cur.data() + static_cast<std::size_t>(origin_row) * width, loss);
    }

    if (final_grid) {
        final_grid->resize((rows - 2) * width);
        std::copy(cur.begin() + width, cur.end() - width, final_grid->begin());
    }
    return loss;
}

}  // namespace detail

// Full joint DP: new(j,h) = old(j,h-1)(1-2p_j) + old(j-1,h)p_{j-1} + old(j+1,h)p_{j+1}.
inline JointPmf joint_evolve(const StepProfile& prof, long long n,
                             std::optional<int> level_cap = {}) {
    if (n < 0) throw std::invalid_argument("joint_evolve: n must be >= 0");
    JointPmf out;
    out.n = n;
    out.cap = level_cap ? *level_cap : auto_level_cap(n);
    if (out.cap < 1) throw std::invalid_argument("joint_evolve: level_cap must be >= 1");
    out.trunc_loss = detail::joint_sweep(
        prof, n, out.cap, [](long long, const double*, double) {}, &out.mass);
    return out;
}

// P(C(2r) = (0,0)) for r = 0..two_n_max/2 from one joint sweep, with the
// cumulative truncation loss recorded at each even step.
struct ReturnSequence {
    int cap = 0;
    std::vector<double> prob;  // prob[r] = P(C(2r) = (0,0))
    std::vector<double> loss;  // loss[r] = cumulative truncation loss at step 2r
};

inline ReturnSequence return_prob_sequence(const StepProfile& prof, long long two_n_max,
                                           std::optional<int> level_cap = {}) {
    if (two_n_max < 0 || (two_n_max & 1))
        throw std::invalid_argument("return_prob_sequence: need even two_n_max >= 0");
    ReturnSequence seq;
    seq.cap = level_cap ? *level_cap : auto_level_cap(two_n_max);
    if (seq.cap < 1) throw std::invalid_argument("return_prob_sequence: level_cap must be >= 1");

    std::vector<double> b(static_cast<std::size_t>(two_n_max) + 1, 0.0);
    for (long long h = 0; h <= two_n_max; h += 2)
        b[static_cast<std::size_t>(h)] = ssrw_return(h);

    seq.prob.reserve(static_cast<std::size_t>(two_n_max / 2) + 1);
    seq.loss.reserve(static_cast<std::size_t>(two_n_max / 2) + 1);
    detail::joint_sweep(
        prof, two_n_max, seq.cap,
        [&](long long m, const double* origin_row, double loss_so_far) {
            if (m & 1) return;
            double s = 0.0;
            for (long long h = 0; h <= m; h += 2) s += origin_row[h] * b[static_cast<std::size_t>(h)];
            seq.prob.push_back(s);
            seq.loss.push_back(loss_so_far);
        },
        nullptr);
    return seq;
}

// Exact origin return probability after two_n steps. Odd step counts return
// 0 outright: both the horizontal and vertical counts would need to be even.
// Accuracy: |error| <= trunc_loss + 2N * 1e-12.
inline double return_prob_exact(const StepProfile& prof, long long two_n,
                                std::optional<int> level_cap = {}) {
    if (two_n < 0) throw std::invalid_argument("return_prob_exact: n must be >= 0");
    if (two_n & 1) return 0.0;
    if (two_n == 0) return 1.0;
    return return_prob_sequence(prof, two_n, level_cap).prob.back();
}

// Path-enumeration oracle: sums the probability of every length-n step
// sequence ending at (0,0). 4^n paths; independent of the DP above.
namespace detail {
inline void brute_force_walk(const StepProfile& prof, int depth, long long x, long long y,
                             double weight, std::map<std::pair<long long, long long>, double>& acc) {
    if (depth == 0) {
        acc[{x, y}] += weight;
        return;
    }
    const double pv = prof.p_at(y);
    const double ph = 0.5 - pv;
    brute_force_walk(prof, depth - 1, x, y + 1, weight * pv, acc);
    brute_force_walk(prof, depth - 1, x, y - 1, weight * pv, acc);
    if (ph > 0.0) {
        brute_force_walk(prof, depth - 1, x + 1, y, weight * ph, acc);
        brute_force_walk(prof, depth - 1, x - 1, y, weight * ph, acc);
    }
}
}  // namespace detail

inline std::map<std::pair<long long, long long>, double> brute_force_distribution(
    const StepProfile& prof, long long n) {
    if (n < 0) throw std::invalid_argument("brute_force_distribution: n must be >= 0");
    if (n > 12) throw TooLarge("brute_force enumeration is limited to n <= 12");
    std::map<std::pair<long long, long long>, double> acc;
    detail::brute_force_walk(prof, static_cast<int>(n), 0, 0, 1.0, acc);
    return acc;
}

inline double brute_force_return(const StepProfile& prof, long long n) {
    const auto dist = brute_force_distribution(prof, n);
    const auto it = dist.find({0, 0});
    return it == dist.end() ? 0.0 : it->second;
}

// Exact E[H_n] without the joint grid: E[H_n] = sum_{m<n} E[1 - 2 p_{C2(m)}],
// i.e. the h-moment of the joint pmf collapsed through the vertical marginal.
inline double expected_horizontal_steps(const StepProfile& prof, long long n,
                                        std::optional<int> level_cap = {}) {
    if (n < 0) throw std::invalid_argument("expected_horizontal_steps: n must be >= 0");
    const int cap = level_cap ? *level_cap : auto_level_cap(n);
    const std::size_t size = 2 * std::size_t(cap) + 3;
    const std::size_t origin = std::size_t(cap) + 1;
    std::vector<double> p(size, 0.0), hold(size, 0.0);
    for (std::size_t i = 1; i + 1 < size; ++i) {
        p[i] = prof.p_at(static_cast<long long>(i) - cap - 1);
        hold[i] = 1.0 - 2.0 * p[i];
    }
    std::vector<double> cur(size, 0.0), nxt(size, 0.0);
    cur[origin] = 1.0;
    double eh = 0.0;
    for (long long m = 1; m <= n; ++m) {
        const long long w = std::min<long long>(m, cap);
        const std::size_t lo = origin - static_cast<std::size_t>(w);
        const std::size_t hi = origin + static_cast<std::size_t>(w);
        for (std::size_t i = lo; i <= hi; ++i) eh += cur[i] * hold[i];
        for (std::size_t i = lo; i <= hi; ++i)
            nxt[i] = cur[i] * hold[i] + cur[i - 1] * p[i - 1] + cur[i + 1] * p[i + 1];
        cur.swap(nxt);
    }
    return eh;
}

// Truncated Green function g(N) = sum_{k<=N} P(C(k) = (0,0)) over even N,
// with the ratio to the predicted (log N) / (4 p_0 pi sqrt(gamma-1)) growth.
struct GreenFunction {
    double theory_constant = 0.0;  // 1 / (4 p_0 pi sqrt(gamma - 1)); NaN if gamma <= 1
    std::vector<double> g;           // g[r] = g(2r)
    std::vector<double> normalized;  // g(2r) / (theory_constant * log(2r)), r >= 1
};

// Accumulate a Green function from an already-computed return sequence
// (prob[r] = P(C(2r) = (0,0))).
inline GreenFunction green_from_returns(const std::vector<double>& prob, double p0, double gamma) {
    GreenFunction gf;
    gf.theory_constant = gamma > 1.0
                             ? 1.0 / (4.0 * p0 * std::numbers::pi * std::sqrt(gamma - 1.0))
                             : std::numeric_limits<double>::quiet_NaN();
    gf.g.resize(prob.size());
    gf.normalized.assign(prob.size(), std::numeric_limits<double>::quiet_NaN());
    double run = 0.0;
    for (std::size_t r = 0; r < prob.size(); ++r) {
        run += prob[r];
        gf.g[r] = run;
        if (r >= 1) gf.normalized[r] = run / (gf.theory_constant * std::log(2.0 * double(r)));
    }
    return gf;
}

inline GreenFunction green_function(const StepProfile& prof, long long n_max,
                                    std::optional<int> level_cap = {}) {
    if (n_max < 0 || (n_max & 1)) throw std::invalid_argument("green_function: need even n_max");
    const ReturnSequence seq = return_prob_sequence(prof, n_max, level_cap);
    return green_from_returns(seq.prob, prof.p_at(0), gamma_of(prof));
}

// Closed-form Green function of the isotropic walk; exact at any horizon,
// which the DP route cannot reach for n ~ 1e6.
inline GreenFunction green_function_isotropic(long long n_max) {
    if (n_max < 0 || (n_max & 1))
        throw std::invalid_argument("green_function_isotropic: need even n_max");
    std::vector<double> prob(static_cast<std::size_t>(n_max / 2) + 1);
    double b = 1.0;  // ssrw_return(2r) via the ratio recurrence
    prob[0] = 1.0;
    for (long long r = 1; r <= n_max / 2; ++r) {
        b *= double(2 * r - 1) / double(2 * r);
        prob[static_cast<std::size_t>(r)] = b * b;
    }
    return green_from_returns(prob, 0.25, 2.0);
}

}  // namespace aniwalk
