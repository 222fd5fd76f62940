#include <cmath>

#include "diqkd/attack.hpp"
#include "diqkd/linalg.hpp"
#include "diqkd/paper_bounds.hpp"
#include "doctest.h"

using namespace diqkd;

TEST_CASE("attack entropies at the endpoints") {
    const auto pure = attack::attack_entropies(0.0, 0.3);
    CHECK(pure.p_bell == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pure.h_eve == doctest::Approx(1.0).epsilon(1e-14));

    const double q2 = attack::q_critical();
    const auto lhv = attack::attack_entropies(q2, 0.3);
    CHECK(lhv.p_bell == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lhv.h_eve == doctest::Approx(linalg::binary_entropy(0.3)).epsilon(1e-12));

    const auto mid = attack::attack_entropies(0.05, 0.3);
    const double pb = (q2 - 0.05) / q2;
    CHECK(mid.p_bell == doctest::Approx(pb).epsilon(1e-12));
    CHECK(mid.h_eve ==
          doctest::Approx(pb + (1.0 - pb) * linalg::binary_entropy(0.3)).epsilon(1e-12));
    CHECK(mid.h_bob == doctest::Approx(linalg::binary_entropy(0.3 + 0.4 * 0.05)).epsilon(1e-12));

    const auto beyond = attack::attack_entropies(0.2, 0.3);
    CHECK(beyond.full_lhv);
    CHECK(beyond.p_bell == 0.0);
}

TEST_CASE("q_att at p = 0.3") {
    CHECK(attack::q_att(0.3) == doctest::Approx(0.09508457904928870).epsilon(1e-8));
}

TEST_CASE("q_att at p = 0 solves 1 - q/q2 = h(q)") {
    const double q = attack::q_att(0.0);
    // oracle: bisection on the stated equation, independent of attack_entropies
    auto f = [](double x) { return 1.0 - x / attack::q_critical() - linalg::binary_entropy(x); };
    double lo = 0.0, hi = attack::q_critical();
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    CHECK(q == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-9));
}

TEST_CASE("q_att nondecreasing across the bias grid") {
    double prev = -1.0;
    for (double p : {0.0, 0.1, 0.2, 0.3, 0.4, 0.45}) {
        const double q = attack::q_att(p);
        CHECK(q >= prev - 1e-12);
        prev = q;
    }
}

TEST_CASE("q_att_limit closed forms agree and dominate q_att") {
    const double lim = attack::q_att_limit();
    CHECK(lim == doctest::Approx(0.09573512820933639).epsilon(1e-12));
    const double q2 = attack::q_critical();
    const double alt = 1.0 - (std::sqrt(7.0 + 4.0 * std::sqrt(2.0)) - 1.0) / (2.0 * std::sqrt(2.0));
    CHECK(std::abs(lim - alt) < 1e-14);
    (void)q2;
    for (double p : {0.0, 0.1, 0.2, 0.3, 0.4, 0.45, 0.49}) CHECK(lim >= attack::q_att(p) - 1e-10);
}

TEST_CASE("published bounds never exceed the attack ceiling") {
    // lower bound at the depolarized CHSH value vs the attack entropy
    for (const auto& rec : certify::paper_bounds()) {
        const auto bound = certify::paper_bound_for(rec.p);
        REQUIRE(bound.has_value());
        for (int i = 0; i <= 50; ++i) {
            const double q = attack::q_critical() * i / 50.0;
            const double nu = 2.0 * std::sqrt(2.0) * (1.0 - 2.0 * q);
            const auto ev = attack::attack_entropies(q, rec.p);
            CHECK(bound->at_nu(nu) <= ev.h_eve + 1e-9);
        }
    }
}

TEST_CASE("threshold ordering: certified rate threshold < attack bound < limit") {
    // the p = 0.3 asymptotic-rate threshold from the published coefficients
    const auto bound = certify::paper_bound_for(0.3);
    REQUIRE(bound.has_value());
    auto rate = [&](double q) {
        const double w = (1.0 - 2.0 * q) * (2.0 + std::sqrt(2.0)) / 4.0 + q;
        return 0.5 * (bound->at_w(w) - linalg::binary_entropy(0.3 + 0.4 * q));
    };
    double lo = 0.0, hi = 0.2;
    for (int i = 0; i < 50; ++i) {
        const double mid = 0.5 * (lo + hi);
        (rate(mid) > 0.0 ? lo : hi) = mid;
    }
    const double q_threshold = 0.5 * (lo + hi);
    CHECK(q_threshold == doctest::Approx(0.09336).epsilon(1e-3));
    CHECK(q_threshold < attack::q_att(0.3));
    CHECK(attack::q_att(0.3) < attack::q_att_limit());
}

TEST_CASE("published bound records are certified and sane at the classical point") {
    for (const auto& rec : certify::paper_bounds()) {
        const auto b = certify::paper_bound_for(rec.p);
        REQUIRE(b.has_value());
        CHECK(b->certified);
        // intercept at nu = 2: a touch below h(p) by the certification slack
        CHECK(b->at_nu(2.0) >= -0.005);
        CHECK(b->at_nu(2.0) <= 1.0);
        CHECK(b->at_nu(2.0) <= linalg::binary_entropy(rec.p) + 1e-12);
        CHECK(b->at_nu(2.0) >= linalg::binary_entropy(rec.p) - 0.005);
    }
}
