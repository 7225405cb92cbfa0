#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "aniwalk/exact.hpp"
#include "aniwalk/simulate.hpp"
#include "aniwalk/stats.hpp"

using namespace aniwalk;

namespace {

StepProfile uniform_quarter() { return StepProfile::uniform(0.25); }
StepProfile periodic_half() { return StepProfile::periodic({0.25, 0.5}); }
// the two-dimensional comb: full line at y = 0, teeth elsewhere
StepProfile comb() { return StepProfile::table(0, {0.25}, 0.5, 0.5); }

bool records_equal(const SimRecord& a, const SimRecord& b) {
    return a.n_steps == b.n_steps && a.final == b.final && a.h_n == b.h_n && a.v_n == b.v_n &&
           a.origin_local_time == b.origin_local_time && a.seed == b.seed &&
           a.local_time == b.local_time && a.embed_overshoot == b.embed_overshoot;
}

// Literal recomputation of D(i, n) from its definition, quadratic on purpose.
long long brute_max_abs_d(const std::vector<int>& steps, long long i) {
    std::vector<long long> s(steps.size() + 1, 0);
    for (std::size_t t = 0; t < steps.size(); ++t) s[t + 1] = s[t] + steps[t];
    long long best = 0;
    for (std::size_t n = 1; n <= steps.size(); ++n) {
        long long xi_i = 0, xi_i1 = 0, cross = 0;
        for (std::size_t j = 1; j <= n; ++j) {
            xi_i += s[j] == i;
            xi_i1 += s[j] == i + 1;
        }
        for (std::size_t l = 0; l < n; ++l)
            if (s[l] == i || s[l] == i + 1) cross += steps[l];
        best = std::max(best, std::llabs(xi_i1 - xi_i - cross));
    }
    return best;
}

}  // namespace

TEST_CASE("zero-step walk", "[sim]") {
    const auto rec = simulate_direct(uniform_quarter(), 0, 7);
    CHECK(rec.final == Site{0, 0});
    CHECK(rec.local_time.empty());
    CHECK(rec.h_n + rec.v_n == 0);
}

TEST_CASE("fixed seed reproduces the record exactly", "[sim]") {
    for (Engine engine : {Engine::Direct, Engine::Embedding}) {
        const SimOptions opts{LocalTimeMode::Full, {}};
        const auto a = simulate(periodic_half(), 5000, 99, opts, engine);
        const auto b = simulate(periodic_half(), 5000, 99, opts, engine);
        CHECK(records_equal(a, b));
    }
}

TEST_CASE("replica batches are reproducible and thread-invariant", "[sim]") {
    const SimOptions opts{LocalTimeMode::Filtered, {{0, 0}, {0, 1}}};
    const auto a = run_replicas(periodic_half(), 2000, 64, 5, opts, Engine::Direct, 1);
    const auto b = run_replicas(periodic_half(), 2000, 64, 5, opts, Engine::Direct, 2);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t r = 0; r < a.records.size(); ++r)
        REQUIRE(records_equal(a.records[r], b.records[r]));

    // R = 1 is exactly the single call with the derived seed
    const auto batch1 = run_replicas(periodic_half(), 500, 1, 42, opts);
    const auto solo = simulate_direct(periodic_half(), 500, replica_seed(42, 0), opts);
    CHECK(records_equal(batch1.records[0], solo));
}

TEST_CASE("replica seeds do not collide", "[sim]") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t r = 0; r < 100000; ++r) seen.insert(replica_seed(123, r));
    CHECK(seen.size() == 100000);
}

TEST_CASE("h + v = n on every record, both engines", "[sim][property]") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const long long n = static_cast<long long>(rng() % 3000);
        for (Engine engine : {Engine::Direct, Engine::Embedding}) {
            const auto rec = simulate(periodic_half(), n, rng(),
                                              {LocalTimeMode::OriginOnly, {}}, engine);
            REQUIRE(rec.h_n + rec.v_n == n);
            REQUIRE(rec.h_n >= 0);
            REQUIRE(rec.v_n >= 0);
        }
    }
}

TEST_CASE("local time totals equal the step count", "[sim][property]") {
    for (Engine engine : {Engine::Direct, Engine::Embedding}) {
        const auto rec = simulate(periodic_half(), 4096, 17, {LocalTimeMode::Full, {}},
                                          engine);
        long long total = 0;
        for (const auto& [site, count] : rec.local_time) total += count;
        CHECK(total == rec.n_steps);
        // origin consistency with the sparse map
        long long origin = 0;
        for (const auto& [site, count] : rec.local_time)
            if (site == Site{0, 0}) origin = count;
        CHECK(origin == rec.origin_local_time);
    }
}

TEST_CASE("direct engine vertical-step frequency matches 2p", "[sim][statistical]") {
    const long long n = 1000000;
    const auto rec = simulate_direct(uniform_quarter(), n, 2718, {LocalTimeMode::OriginOnly, {}});
    const double freq = double(rec.v_n) / double(n);
    const double sigma = std::sqrt(0.25 / double(n));
    CHECK(std::abs(freq - 0.5) <= 4.0 * sigma);
}

TEST_CASE("geometric sampler degenerate and moment checks", "[sim][statistical]") {
    SplitMix64 rng(5);
    for (int i = 0; i < 100000; ++i) REQUIRE(sample_geometric(rng, 1.0) == 0);

    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double k = double(sample_geometric(rng, 0.5));
        sum += k;
        sumsq += k * k;
    }
    const double mean = sum / n;                       // E G = (1-a)/a = 1
    const double var = sumsq / n - mean * mean;        // Var G = (1-a)/a^2 = 2
    CHECK(std::abs(mean - 1.0) <= 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(var - 2.0) <= 0.05);

    CHECK_THROWS_AS(sample_geometric(rng, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sample_geometric(rng, 1.5), std::invalid_argument);
}

TEST_CASE("comb teeth admit no horizontal motion", "[sim]") {
    // p = 1/2 off the baseline means alpha = 1 there: every geometric run is
    // empty, so any site off y = 0 sits directly above/below a baseline visit
    const auto rec = simulate_embedding(comb(), 20000, 11, {LocalTimeMode::Full, {}});
    std::set<std::pair<long long, long long>> visited;
    for (const auto& [site, count] : rec.local_time) visited.insert({site.x, site.y});
    for (const auto& [x, y] : visited)
        if (y != 0) REQUIRE((x == 0 || visited.count({x, 0}) > 0));
}

TEST_CASE("embedding matches the exact law at n = 6", "[sim][statistical]") {
    const auto prof = periodic_half();
    const auto exact = brute_force_distribution(prof, 6);
    std::vector<std::pair<long long, long long>> support;
    std::vector<double> expected;
    for (const auto& [site, p] : exact) {
        support.push_back(site);
        expected.push_back(p);
    }
    const long long reps = 200000;
    const auto batch =
        run_replicas(prof, 6, reps, 77, {LocalTimeMode::OriginOnly, {}}, Engine::Embedding);
    std::map<std::pair<long long, long long>, double> counts;
    for (const auto& rec : batch.records) ++counts[{rec.final.x, rec.final.y}];
    std::vector<double> observed(support.size(), 0.0);
    for (std::size_t i = 0; i < support.size(); ++i) {
        const auto it = counts.find(support[i]);
        observed[i] = it == counts.end() ? 0.0 : it->second;
    }
    const auto res = chi_square_gof(observed, expected);
    CHECK(res.p_value >= 1e-3);
}

TEST_CASE("embedding overshoot: the in-flight geometric tail is rare", "[sim][statistical]") {
    // weak form of the exponential tail: no overshoot beyond sqrt(N) across
    // 1e5 replicas at N = 1e4 when omega >= 0.1
    const long long n = 10000;
    const auto batch = run_replicas(periodic_half(), n, 100000, 310,
                                    {LocalTimeMode::OriginOnly, {}}, Engine::Embedding);
    const double threshold = std::sqrt(double(n));
    long long exceed = 0;
    for (const auto& rec : batch.records) {
        REQUIRE(rec.embed_overshoot >= 0);
        if (double(rec.embed_overshoot) > threshold) ++exceed;
    }
    CHECK(exceed == 0);
}

TEST_CASE("local-time crossing deviation bound holds exhaustively on short paths", "[sim][oracle]") {
    for (unsigned mask = 0; mask < (1u << 12); ++mask) {
        std::vector<int> steps(12);
        for (int b = 0; b < 12; ++b) steps[b] = (mask >> b) & 1 ? 1 : -1;
        for (long long i = -2; i <= 2; ++i) {
            const long long got = local_time_crossing_deviation(steps, i);
            REQUIRE(got <= 2);
            REQUIRE(got == brute_max_abs_d(steps, i));
        }
    }
}

TEST_CASE("local-time crossing deviation bound holds on random long paths", "[sim][property]") {
    SplitMix64 rng(808);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> steps(2000);
        for (int& x : steps) x = rng.uniform() < 0.5 ? 1 : -1;
        for (long long i = -3; i <= 3; ++i) REQUIRE(local_time_crossing_deviation(steps, i) <= 2);
    }
    CHECK(local_time_crossing_deviation({}, 0) == 0);
    CHECK_THROWS_AS(local_time_crossing_deviation({1, 2, -1}, 0), std::invalid_argument);
}

TEST_CASE("truncated geometric variance", "[sim]") {
    CHECK(truncated_geometric_variance(1.0, 50) == 0.0);
    CHECK(truncated_geometric_variance(0.3, 0) == 0.0);
    // alpha = 1/2, L = 1: P(0) = P(1) = 1/2, variance 1/4
    CHECK(truncated_geometric_variance(0.5, 1) == Catch::Approx(0.25).margin(1e-15));
    // alpha = 1/2, L = 2: P = (1/2, 1/4, 1/4), variance 11/16 - ... = 0.6875
    CHECK(truncated_geometric_variance(0.5, 2) == Catch::Approx(0.6875).margin(1e-15));
    for (double alpha : {0.1, 0.2, 0.5, 0.9})
        for (long long L = 0; L <= 40; ++L)
            REQUIRE(truncated_geometric_variance(alpha, L) <= 2.0 / (alpha * alpha));
    CHECK_THROWS_AS(truncated_geometric_variance(0.0, 5), std::invalid_argument);
}

TEST_CASE("H_N statistics against the exact moment", "[sim][statistical]") {
    const long long n = 10000;
    const auto batch = run_replicas(uniform_quarter(), n, 2000, 92,
                                    {LocalTimeMode::OriginOnly, {}});
    const double exact = expected_horizontal_steps(uniform_quarter(), n);
    const auto st = hn_statistics(batch, 0.2, exact);
    CHECK(std::abs(st.mean_h / double(n) - 0.5) <= 4.0 * st.se_mean / double(n));
    CHECK(std::abs(st.exact_z) <= 4.0);
    CHECK(st.tail_freq >= 0.0);
    CHECK(st.tail_freq <= 1.0);
    CHECK(st.gamma_star == 0.5);

    const auto degenerate = run_replicas(StepProfile::uniform(0.5), 100, 4, 3,
                                         {LocalTimeMode::OriginOnly, {}});
    CHECK_THROWS_AS(hn_statistics(degenerate), GammaNotAboveOne);
}
