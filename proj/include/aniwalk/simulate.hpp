#pragma once

// Reproducible Monte Carlo for the anisotropic walk: the direct per-step
// sampler and the geometric-embedding construction (horizontal runs of
// Geom(2 p_j) length interleaved with single vertical steps), plus the
// replica runner and the per-batch H_N statistics.
//
// Determinism contract: a record is a pure function of (profile, n_steps,
// seed); replica seeds derive injectively from (base_seed, index), so
// batches are bit-identical regardless of thread count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "aniwalk/profile.hpp"
#include "aniwalk/rng.hpp"

namespace aniwalk {

struct Site {
    long long x = 0;
    long long y = 0;
    friend auto operator<=>(const Site&, const Site&) = default;
};

struct SimRecord {
    long long n_steps = 0;
    Site final;
    long long h_n = 0;  // horizontal steps among the first n
    long long v_n = 0;  // vertical steps; h_n + v_n == n_steps
    long long origin_local_time = 0;
    std::uint64_t seed = 0;
    // Sparse local-time map Xi((k,j), n): every visited site in Full mode,
    // the requested sites in Filtered mode, empty in OriginOnly mode. The
    // initial site is not counted; visits are recorded from step 1 on.
    std::vector<std::pair<Site, long long>> local_time;
    // Embedding engine only: remainder of the in-flight geometric run cut
    // off by the step budget (the H_N^+ - H_N gap).
    long long embed_overshoot = 0;
};

enum class LocalTimeMode { Full, OriginOnly, Filtered };

struct SimOptions {
    LocalTimeMode mode = LocalTimeMode::Full;
    std::vector<Site> sites;  // used by Filtered mode
};

enum class Engine { Direct, Embedding };

inline const char* engine_name(Engine e) { return e == Engine::Direct ? "direct" : "embedding"; }

// Geometric on {0, 1, ...} with P(k) = alpha (1-alpha)^k, by inversion of a
// single uniform draw; alpha = 1 (a p_j = 1/2 comb tooth) always yields 0.
inline long long sample_geometric(SplitMix64& rng, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("sample_geometric: alpha must be in (0, 1]");
    if (alpha == 1.0) return 0;
    const double k = std::floor(std::log(rng.uniform_open()) / std::log1p(-alpha));
    return static_cast<long long>(std::min(k, 4.0e18));
}

namespace detail {

// Steppers cache whatever makes the level-dependent lookup cheap; move()
// receives the vertical displacement of the step (-1, 0 or +1).

struct UniformStepper {
    double p;
    double prob() const { return p; }
    void move(long long) {}
};

// Tracks y mod L incrementally; no division in the step loop.
struct PeriodicStepper {
    const double* tab;
    long long length;
    long long idx = 0;
    double prob() const { return tab[idx]; }
    void move(long long dy) {
        idx += dy;
        idx = idx >= length ? 0 : (idx < 0 ? length - 1 : idx);
    }
};

struct TableStepper {
    const StepProfile* prof;
    long long y = 0;
    double prob() const { return prof->p_at(y); }
    void move(long long dy) { y += dy; }
};

struct OriginTracker {
    long long origin = 0;
    void visit(long long x, long long y) { origin += (x == 0 && y == 0) ? 1 : 0; }
    void emit(SimRecord& rec) const { rec.origin_local_time = origin; }
};

struct FilteredTracker {
    const std::vector<Site>* sites;
    std::vector<long long> counts;
    long long origin = 0;
    explicit FilteredTracker(const std::vector<Site>& s) : sites(&s), counts(s.size(), 0) {}
    void visit(long long x, long long y) {
        origin += (x == 0 && y == 0) ? 1 : 0;
        for (std::size_t i = 0; i < counts.size(); ++i)
            counts[i] += (x == (*sites)[i].x && y == (*sites)[i].y) ? 1 : 0;
    }
    void emit(SimRecord& rec) const {
        rec.origin_local_time = origin;
        rec.local_time.reserve(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i)
            rec.local_time.emplace_back((*sites)[i], counts[i]);
    }
};

struct FullTracker {
    std::map<Site, long long> visits;
    void visit(long long x, long long y) { ++visits[{x, y}]; }
    void emit(SimRecord& rec) const {
        rec.local_time.assign(visits.begin(), visits.end());
        const auto it = visits.find({0, 0});
        rec.origin_local_time = it == visits.end() ? 0 : it->second;
    }
};

// One uniform draw decides the step: [0,p) up, [p,2p) down, [2p,1/2+p)
// right, rest left. Branch-free; ~1e8 steps/s per core.
template <class Stepper, class Tracker>
SimRecord direct_walk(Stepper st, long long n, std::uint64_t seed, Tracker trk) {
    SplitMix64 rng(seed);
    long long x = 0, y = 0, v = 0;
    for (long long step = 0; step < n; ++step) {
        const double p = st.prob();
        const double u = rng.uniform();
        const long long vert = u < 2.0 * p ? 1 : 0;
        const long long up = u < p ? 1 : 0;
        const long long right = u < 0.5 + p ? 1 : 0;
        const long long dy = vert * (2 * up - 1);
        y += dy;
        x += (1 - vert) * (2 * right - 1);
        v += vert;
        st.move(dy);
        trk.visit(x, y);
    }
    SimRecord rec;
    rec.n_steps = n;
    rec.final = {x, y};
    rec.h_n = n - v;
    rec.v_n = v;
    rec.seed = seed;
    trk.emit(rec);
    return rec;
}

template <class Stepper, class Tracker>
SimRecord embedding_walk(Stepper st, long long n, std::uint64_t seed, Tracker trk) {
    SplitMix64 rng(seed);
    long long x = 0, y = 0, h = 0, v = 0, done = 0, overshoot = 0;
    while (done < n) {
        const long long g = sample_geometric(rng, 2.0 * st.prob());
        const long long run = std::min(g, n - done);
        for (long long t = 0; t < run; ++t) {
            x += rng.uniform() < 0.5 ? 1 : -1;
            ++h;
            ++done;
            trk.visit(x, y);
        }
        if (done == n) {
            overshoot = g - run;
            break;
        }
        const long long dy = rng.uniform() < 0.5 ? 1 : -1;
        y += dy;
        st.move(dy);
        ++v;
        ++done;
        trk.visit(x, y);
    }
    SimRecord rec;
    rec.n_steps = n;
    rec.final = {x, y};
    rec.h_n = h;
    rec.v_n = v;
    rec.seed = seed;
    rec.embed_overshoot = overshoot;
    trk.emit(rec);
    return rec;
}

template <class Tracker>
SimRecord run_one(const StepProfile& prof, long long n, std::uint64_t seed, Engine engine,
                  Tracker trk) {
    switch (prof.kind()) {
        case ProfileKind::Uniform: {
            UniformStepper st{prof.values()[0]};
            return engine == Engine::Direct ? direct_walk(st, n, seed, std::move(trk))
                                            : embedding_walk(st, n, seed, std::move(trk));
        }
        case ProfileKind::Periodic: {
            PeriodicStepper st{prof.values().data(), prof.period(), 0};
            return engine == Engine::Direct ? direct_walk(st, n, seed, std::move(trk))
                                            : embedding_walk(st, n, seed, std::move(trk));
        }
        case ProfileKind::Table:
        default: {
            TableStepper st{&prof, 0};
            return engine == Engine::Direct ? direct_walk(st, n, seed, std::move(trk))
                                            : embedding_walk(st, n, seed, std::move(trk));
        }
    }
}

}  // namespace detail

inline SimRecord simulate(const StepProfile& prof, long long n_steps, std::uint64_t seed,
                          const SimOptions& opts, Engine engine) {
    if (n_steps < 0) throw std::invalid_argument("simulate: n_steps must be >= 0");
    switch (opts.mode) {
        case LocalTimeMode::OriginOnly:
            return detail::run_one(prof, n_steps, seed, engine, detail::OriginTracker{});
        case LocalTimeMode::Filtered:
            return detail::run_one(prof, n_steps, seed, engine, detail::FilteredTracker{opts.sites});
        case LocalTimeMode::Full:
        default:
            return detail::run_one(prof, n_steps, seed, engine, detail::FullTracker{});
    }
}

inline SimRecord simulate_direct(const StepProfile& prof, long long n_steps, std::uint64_t seed,
                                 const SimOptions& opts = {}) {
    return simulate(prof, n_steps, seed, opts, Engine::Direct);
}

inline SimRecord simulate_embedding(const StepProfile& prof, long long n_steps, std::uint64_t seed,
                                    const SimOptions& opts = {}) {
    return simulate(prof, n_steps, seed, opts, Engine::Embedding);
}

struct ReplicaBatch {
    StepProfile profile;
    long long n_steps = 0;
    long long replicas = 0;
    std::uint64_t base_seed = 0;
    Engine engine = Engine::Direct;
    SimOptions options;
    std::vector<SimRecord> records;
};

// R independent replicas; replica r always uses replica_seed(base_seed, r),
// so the batch content does not depend on the number of worker threads.
inline ReplicaBatch run_replicas(const StepProfile& prof, long long n_steps, long long replicas,
                                 std::uint64_t base_seed, const SimOptions& opts = {},
                                 Engine engine = Engine::Direct, unsigned threads = 0) {
    if (replicas < 1) throw std::invalid_argument("run_replicas: need R >= 1");
    ReplicaBatch batch{prof, n_steps, replicas, base_seed, engine, opts, {}};
    batch.records.resize(static_cast<std::size_t>(replicas));

    unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    t = std::min<unsigned>(t, static_cast<unsigned>(replicas));
    auto work = [&](std::atomic<long long>& next) {
        for (;;) {
            const long long r = next.fetch_add(1, std::memory_order_relaxed);
            if (r >= replicas) return;
            batch.records[static_cast<std::size_t>(r)] =
                simulate(prof, n_steps, replica_seed(base_seed, std::uint64_t(r)), opts,
                                 engine);
        }
    };
    std::atomic<long long> next{0};
    if (t <= 1) {
        work(next);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(t);
        for (unsigned i = 0; i < t; ++i) pool.emplace_back([&] { work(next); });
        for (auto& th : pool) th.join();
    }
    return batch;
}

// Running max of |D(i, n)| along a simple +-1 path, where
//   D(i,n) = xi(i+1, n) - xi(i, n) - sum_{l<n} I(i,l) X_{l+1},
//   I(i,l) = 1 iff S_l is i or i+1.
inline long long local_time_crossing_deviation(const std::vector<int>& steps, long long level) {
    long long s = 0, xi_lo = 0, xi_hi = 0, cross = 0, worst = 0;
    for (int x : steps) {
        if (x != 1 && x != -1) throw std::invalid_argument("local_time_crossing_deviation: steps must be +-1");
        if (s == level || s == level + 1) cross += x;
        s += x;
        xi_lo += (s == level) ? 1 : 0;
        xi_hi += (s == level + 1) ? 1 : 0;
        worst = std::max(worst, std::llabs(xi_hi - xi_lo - cross));
    }
    return worst;
}

// Exact variance of the geometric law truncated at L: P(k) = alpha(1-alpha)^k
// for k < L and P(L) = (1-alpha)^L, by direct summation.
inline double truncated_geometric_variance(double alpha, long long L) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("truncated_geometric_variance: alpha must be in (0, 1]");
    if (L < 0) throw std::invalid_argument("truncated_geometric_variance: L must be >= 0");
    if (L == 0 || alpha == 1.0) return 0.0;
    double q = 1.0;  // (1-alpha)^k
    double e1 = 0.0, e2 = 0.0;
    for (long long k = 0; k < L; ++k) {
        const double pk = alpha * q;
        e1 += double(k) * pk;
        e2 += double(k) * double(k) * pk;
        q *= 1.0 - alpha;
    }
    e1 += double(L) * q;
    e2 += double(L) * double(L) * q;
    return e2 - e1 * e1;
}

struct HnStatistics {
    long long n = 0;
    long long replicas = 0;
    double mean_h = 0.0;
    double se_mean = 0.0;       // sample std / sqrt(R)
    double gamma_star = 0.0;
    double deviation = 0.0;     // |mean - gamma* n|
    double deviation_n34 = 0.0; // deviation / n^(3/4)
    double rho = 0.0;
    double tail_threshold = 0.0;  // n^(1-rho)
    double tail_freq = 0.0;       // fraction of |H - gamma* n| > n^(1-rho)
    double tail_bound = 0.0;      // 2 / (n^(1-2 rho) omega^2), reported not asserted
    std::optional<double> exact_mean;
    double exact_z = 0.0;  // (mean - exact_mean) / se_mean when exact_mean given
};

inline HnStatistics hn_statistics(const ReplicaBatch& batch, double rho = 0.2,
                                  std::optional<double> exact_mean = {}) {
    if (batch.records.empty()) throw std::invalid_argument("hn_statistics: empty batch");
    const double gamma = gamma_of(batch.profile);
    if (gamma <= 1.0) throw GammaNotAboveOne("hn_statistics: profile has gamma <= 1");

    HnStatistics st;
    st.n = batch.n_steps;
    st.replicas = static_cast<long long>(batch.records.size());
    st.gamma_star = (gamma - 1.0) / gamma;
    st.rho = rho;
    const double n = double(batch.n_steps);
    st.tail_threshold = std::pow(n, 1.0 - rho);
    st.tail_bound = 2.0 / (std::pow(n, 1.0 - 2.0 * rho) * batch.profile.omega() *
                           batch.profile.omega());

    const double target = st.gamma_star * n;
    double sum = 0.0, sumsq = 0.0;
    long long exceed = 0;
    for (const SimRecord& rec : batch.records) {
        const double hval = double(rec.h_n);
        sum += hval;
        sumsq += hval * hval;
        if (std::abs(hval - target) > st.tail_threshold) ++exceed;
    }
    const double r = double(st.replicas);
    st.mean_h = sum / r;
    const double var = std::max(0.0, (sumsq - sum * sum / r) / std::max(1.0, r - 1.0));
    st.se_mean = std::sqrt(var / r);
    st.deviation = std::abs(st.mean_h - target);
    st.deviation_n34 = st.deviation / std::pow(n, 0.75);
    st.tail_freq = double(exceed) / r;
    st.exact_mean = exact_mean;
    if (exact_mean && st.se_mean > 0.0) st.exact_z = (st.mean_h - *exact_mean) / st.se_mean;
    return st;
}

}  // namespace aniwalk
