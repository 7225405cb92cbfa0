#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "aniwalk/profile.hpp"
#include "aniwalk/rng.hpp"

using namespace aniwalk;

namespace {
StepProfile periodic_half() { return StepProfile::periodic({0.25, 0.5}); }
}  // namespace

TEST_CASE("p_at evaluates each profile kind", "[profile]") {
    CHECK(StepProfile::uniform(0.25).p_at(7) == 0.25);
    CHECK(periodic_half().p_at(-3) == 0.5);  // p_{-3} = p_1 by periodicity
    const auto table = StepProfile::table(5, {0.3}, 0.5, 0.45);
    CHECK(table.p_at(5) == 0.3);
    CHECK(table.p_at(99) == 0.5);   // positive tail default
    CHECK(table.p_at(-99) == 0.45); // negative tail default
}

TEST_CASE("profile validation rejects bad step probabilities", "[profile]") {
    CHECK_THROWS_AS(StepProfile::uniform(0.6), ProfileError);
    CHECK_THROWS_AS(StepProfile::uniform(0.0), ProfileError);
    CHECK_THROWS_AS(StepProfile::uniform(-0.1), ProfileError);
    CHECK_THROWS_AS(StepProfile::periodic({}), ProfileError);
    CHECK_THROWS_AS(StepProfile::periodic({0.25, 0.7}), ProfileError);
    CHECK_THROWS_AS(StepProfile::uniform(0.25, 0.3), ProfileError);  // omega above inf p_j
    CHECK_THROWS_AS(StepProfile::table(0, {0.25}, 0.5, 0.5, 0.0), ProfileError);
}

TEST_CASE("degenerate all-half profile is constructible but flagged", "[profile]") {
    const auto prof = StepProfile::uniform(0.5);
    CHECK_FALSE(prof.warnings().empty());
    CHECK(gamma_of(prof) == 1.0);
}

TEST_CASE("gamma_of closed forms", "[profile]") {
    CHECK(gamma_of(StepProfile::uniform(0.25)) == 2.0);
    CHECK(gamma_of(periodic_half()) == Catch::Approx(1.5).margin(0));
    CHECK_THROWS_AS(gamma_of(StepProfile::table(0, {0.25}, 0.25, 0.5)), AsymmetricTails);
    // equal tails: the Cesaro limit is the tail value's
    CHECK(gamma_of(StepProfile::table(-2, {0.3, 0.4, 0.3, 0.2, 0.5}, 0.25, 0.25)) == 2.0);
}

TEST_CASE("check_heyde on a periodic profile", "[profile]") {
    const auto res = check_heyde(periodic_half(), 10000);
    CHECK(std::abs(res.gamma_hat - 1.5) <= 1e-3);
    CHECK(res.eta_hat >= 1.0);  // periodic averages converge at O(1/n)
    CHECK(res.residual_table.size() == 10000);
}

TEST_CASE("check_heyde on a constant profile is exact", "[profile]") {
    const auto res = check_heyde(StepProfile::uniform(0.25), 1000);
    CHECK(res.gamma_hat == 2.0);
    for (const auto& row : res.residual_table) {
        CHECK(row.avg_pos == 4.0);
        CHECK(row.avg_neg == 4.0);
    }
    CHECK(std::isinf(res.eta_hat));  // all residuals exactly zero
}

TEST_CASE("check_heyde detects one-sided disagreement", "[profile]") {
    // half-plane half-comb: p_j = 1/4 upward, 1/2 downward
    const auto hphc = StepProfile::table(0, {0.25}, 0.25, 0.5);
    CHECK_THROWS_AS(check_heyde(hphc, 1000), SidesDisagree);
    CHECK_THROWS_AS(check_heyde(periodic_half(), 50), std::invalid_argument);
}

TEST_CASE("kappa and beta prefix averages", "[profile]") {
    const auto kb_uni = kappa_beta(StepProfile::uniform(0.25), 3);
    for (double v : kb_uni.kappa) CHECK(v == 4.0);
    for (double v : kb_uni.beta) CHECK(v == 4.0);

    // kappa_1 = 1/p_1 = 2, kappa_2 = (1/p_1 + 1/p_2)/2 = (2 + 4)/2 = 3
    const auto kb = kappa_beta(periodic_half(), 2);
    CHECK(kb.kappa[0] == 2.0);
    CHECK(kb.kappa[1] == 3.0);
    CHECK(kb.beta[0] == 2.0);
    CHECK(kb.beta[1] == 3.0);

    CHECK_THROWS_AS(kappa_beta(periodic_half(), 0), std::invalid_argument);
}

TEST_CASE("j |kappa_j - 2 gamma| stays finite over the computed range", "[profile]") {
    const auto prof = StepProfile::periodic({0.2, 0.35, 0.5});
    const double two_gamma = 2.0 * gamma_of(prof);
    const auto kb = kappa_beta(prof, 200);
    for (std::size_t i = 0; i < kb.kappa.size(); ++i) {
        const double v = double(i + 1) * std::abs(kb.kappa[i] - two_gamma);
        CHECK(std::isfinite(v));
    }
}

TEST_CASE("profile properties over random valid profiles", "[profile][property]") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        StepProfile prof = [&] {
            switch (rng() % 3) {
                case 0:
                    return StepProfile::uniform(0.05 + 0.45 * rng.uniform());
                case 1: {
                    std::vector<double> tab(1 + rng() % 6);
                    for (double& p : tab) p = 0.05 + 0.45 * rng.uniform();
                    return StepProfile::periodic(std::move(tab));
                }
                default: {
                    std::vector<double> vals(1 + rng() % 5);
                    for (double& p : vals) p = 0.05 + 0.45 * rng.uniform();
                    const double tail = 0.05 + 0.45 * rng.uniform();
                    return StepProfile::table(-(long long)(rng() % 4), std::move(vals), tail, tail);
                }
            }
        }();
        for (long long j = -50; j <= 50; ++j) {
            const double p = prof.p_at(j);
            REQUIRE(p > 0.0);
            REQUIRE(p <= 0.5);
            REQUIRE(p >= prof.omega());
        }
        if (prof.kind() == ProfileKind::Periodic) {
            const long long L = prof.period();
            for (long long j = -20; j <= 20; ++j) REQUIRE(prof.p_at(j) == prof.p_at(j + L));
        }
    }
}

TEST_CASE("heyde averages of a periodic profile hit gamma at full periods", "[profile]") {
    // dyadic entries: every 1/p_j is integral, so the identity is exact in
    // floating point, not just up to rounding
    const auto prof = StepProfile::periodic({0.25, 0.5, 0.125, 0.25});
    const double two_gamma = 2.0 * gamma_of(prof);
    const auto res = check_heyde(prof, 400);
    for (long long n = 4; n <= 400; n += 4) {
        CHECK(res.residual_table[n - 1].avg_pos == two_gamma);
        CHECK(res.residual_table[n - 1].avg_neg == two_gamma);
    }
    const auto res3 = check_heyde(StepProfile::periodic({0.2, 0.35, 0.5}), 300);
    const double tg3 = 2.0 * gamma_of(StepProfile::periodic({0.2, 0.35, 0.5}));
    for (long long n = 3; n <= 300; n += 3)
        CHECK(res3.residual_table[n - 1].avg_pos == Catch::Approx(tg3).epsilon(1e-12));
}

TEST_CASE("diagnostics aggregates the derived constants", "[profile]") {
    const auto d = diagnostics(periodic_half(), 1000);
    CHECK(d.gamma == Catch::Approx(1.5));
    CHECK(d.gamma_star == Catch::Approx(1.0 / 3.0));
    CHECK(d.sigma == Catch::Approx(1.0 / std::sqrt(1.5)));
    CHECK(d.mu_local_limit == Catch::Approx(3.0));
    CHECK(d.omega == 0.25);
    CHECK(d.gamma_star > 0.0);
    CHECK(d.gamma_star < 1.0);
    CHECK(d.warnings.empty());

    const auto dd = diagnostics(StepProfile::uniform(0.5), 1000);
    CHECK_FALSE(dd.warnings.empty());
}
