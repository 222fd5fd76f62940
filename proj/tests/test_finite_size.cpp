#include <cmath>

#include "diqkd/finite_size.hpp"
#include "diqkd/paper_bounds.hpp"
#include "diqkd/stats.hpp"
#include "doctest.h"

using namespace diqkd;
using namespace diqkd::finitesize;
using certify::AffineEntropyBound;

namespace {

AffineEntropyBound paper0() { return *certify::paper_bound_for(0.0); }

EpsilonLedger default_ledger() {
    EpsilonLedger e;
    e.eps_ec_com = 5e-3;
    e.eps_pe_com = 5e-3;
    e.eps_ea = 5e-7;
    e.eps_pa = 2.5e-7;
    e.eps_s = 1.25e-7;
    e.eps_s1 = 6.25e-8;
    e.eps_s2 = 1.5e-8;
    e.eps_h = 2.5e-7;
    return e;
}

}  // namespace

TEST_CASE("affine bound evaluation matches the published coefficients") {
    const auto b = certify::affine_bound(1.190, -0.00454, 0.0, true);
    CHECK(b.at_nu(2.0 * std::sqrt(2.0)) == doctest::Approx(0.981288).epsilon(1e-4));
    const auto b2 = certify::affine_bound(0.327, 0.72063, 0.2, true);
    CHECK(b2.at_nu(2.0) == doctest::Approx(0.72063).epsilon(1e-12));
    CHECK(b2.at_nu(2.0) == doctest::Approx(linalg::binary_entropy(0.2)).epsilon(2e-3));
    // w = 3/4 is the nu = 2 point
    CHECK(b.at_w(0.75) == doctest::Approx(b.at_nu(2.0)).epsilon(1e-12));
}

TEST_CASE("g_of_w limits") {
    const auto lp = paper0();
    const auto l0 = paper0();
    CHECK(g_of_w(lp, l0, 1e-12, 0.8) == doctest::Approx(0.5 * lp.at_w(0.8)).epsilon(1e-9));
    CHECK(g_of_w(lp, l0, 1.0, 0.8) == doctest::Approx(l0.at_w(0.8)).epsilon(1e-12));
    const double w_ts = (2.0 + std::sqrt(2.0)) / 4.0;
    const double expect = 0.99 / 2.0 * lp.at_w(w_ts) + 0.01 * l0.at_w(w_ts);
    CHECK(g_of_w(lp, l0, 0.01, w_ts) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("tradeoff stats at beta = g(1)") {
    const Affine g = g_of_w(paper0(), paper0(), 0.05);
    const double beta = g(1.0);
    const auto st = tradeoff_stats(g, 0.05, beta);
    const double d0 = beta - g(0.0);
    CHECK(st.var_f_bound ==
          doctest::Approx((2.0 + std::sqrt(2.0)) / (4.0 * 0.05) * d0 * d0).epsilon(1e-12));
    CHECK(st.max_f == doctest::Approx(g(1.0)).epsilon(1e-9));  // gamma cancels at beta = g(1)
    CHECK(st.min_f == doctest::Approx(g((2.0 - std::sqrt(2.0)) / 4.0)).epsilon(1e-12));
    CHECK_THROWS_AS(tradeoff_stats(g, 0.05, g(0.0) - 1.0), std::invalid_argument);
}

TEST_CASE("tradeoff stats at gamma = 1") {
    const Affine g = g_of_w(paper0(), paper0(), 1.0);
    const auto st = tradeoff_stats(g, 1.0, g(1.0));
    CHECK(st.max_f == doctest::Approx(g(1.0)).epsilon(1e-12));
}

TEST_CASE("v_and_k limiting values") {
    TradeoffStats st;
    st.var_f_bound = 0.0;
    st.max_f = st.min_f = 1.0;
    const auto vk = v_and_k(st, 1.5, dim_s_log_standard());
    CHECK(vk.v == doctest::Approx(std::sqrt(2.0) + std::log2(73.0)).epsilon(1e-12));

    const auto vk_near1 = v_and_k(st, 1.0 + 1e-9, dim_s_log_standard());
    const double lnc = std::log(36.0 + std::exp(2.0));
    CHECK(vk_near1.k_alpha == doctest::Approx(lnc * lnc * lnc / (6.0 * std::log(2.0))).epsilon(1e-6));

    // paper-style inputs stay finite and positive
    const Affine g = g_of_w(paper0(), paper0(), 0.05);
    const auto st2 = tradeoff_stats(g, 0.05, g(1.0));
    const auto vk2 = v_and_k(st2, 1.0001, dim_s_log_standard());
    CHECK(vk2.v > 0.0);
    CHECK(vk2.k_alpha > 0.0);
    CHECK(std::isfinite(vk2.k_alpha));
}

TEST_CASE("completeness matches the exact oracle at n = 1e6") {
    const double v = completeness_pe_general(1e6, 0.05, 0.8, 0.02);
    const double k1 = std::floor(0.78 * 0.05 * 1e6);
    const double k2 = std::floor((1.0 - 0.05 + 0.8 * 0.05 - 0.02 * 0.05) * 1e6);
    const double expect = stats::binom_cdf_exact(1000000, 0.05 * 0.8, (int64_t)k1) +
                          stats::binom_cdf_exact(1000000, 0.95 + 0.04, (int64_t)k2);
    CHECK(v == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("completeness is monotone decreasing in delta_tol") {
    double prev = 3.0;
    for (double dt : {0.001, 0.005, 0.01, 0.02, 0.05}) {
        const double v = completeness_pe_general(1e6, 0.05, 0.8, dt);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}

TEST_CASE("completeness with deterministic wins") {
    // first term cdfBin(10, 1*gamma, ...) with w_exp = 1, gamma = 1
    const double v = completeness_pe_general(10, 1.0, 1.0, 0.05);
    CHECK(v == doctest::Approx(0.0).epsilon(1e-30));
}

TEST_CASE("key length zero when no certified entropy") {
    FiniteSizeInputs inp;
    inp.n = 1e8;
    inp.gamma = 0.01;
    inp.delta_tol = 0.01;
    inp.eps = default_ledger();
    inp.ec_max = 0;
    Affine g{-0.5, 0.4};  // g(w) < 0 everywhere relevant
    inp.tuning.alpha = 1.0001;
    inp.tuning.alpha_prime = 1.0001;
    inp.tuning.beta = g(1.0) - 1e-6;
    CHECK(key_length_general(inp, g, 0.8) == 0);
}

TEST_CASE("key length decreases with ec_max and delta_tol") {
    const auto lp = paper0();
    const Affine g = g_of_w(lp, lp, 0.01);
    FiniteSizeInputs inp;
    inp.n = 3e8;
    inp.gamma = 0.01;
    inp.delta_tol = 0.0015;
    inp.eps = default_ledger();
    inp.ec_max = 1000;
    inp.tuning.alpha = 1.00002;
    inp.tuning.alpha_prime = 1.0002;
    inp.tuning.beta = g(1.0) - 1e-6;
    const auto base = key_length_general(inp, g, 0.797);
    CHECK(base > 0);

    FiniteSizeInputs more_ec = inp;
    more_ec.ec_max = 2000000;
    CHECK(key_length_general(more_ec, g, 0.797) < base);

    FiniteSizeInputs more_dt = inp;
    more_dt.delta_tol = 0.004;
    CHECK(key_length_general(more_dt, g, 0.797) < base);

    for (int which = 0; which < 5; ++which) {
        FiniteSizeInputs small_eps = inp;
        switch (which) {
            case 0: small_eps.eps.eps_pa *= 1e-6; break;
            case 1: small_eps.eps.eps_h *= 1e-6; break;
            case 2: small_eps.eps.eps_s1 *= 1e-6; break;
            case 3: small_eps.eps.eps_s2 *= 1e-6; break;
            case 4: small_eps.eps.eps_ea *= 1e-6; break;
        }
        CHECK(key_length_general(small_eps, g, 0.797) < base);
    }
}

TEST_CASE("ledger constraint is enforced") {
    EpsilonLedger e = default_ledger();
    e.eps_s1 = e.eps_s;  // violates eps_s > eps_s' + 2 eps_s''
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
}

TEST_CASE("collective dominates general at identical shared inputs") {
    const auto lp = paper0();
    for (double n : {1e8, 1e9, 1e10}) {
        for (double gamma : {0.005, 0.02}) {
            const Affine g = g_of_w(lp, lp, gamma);
            FiniteSizeInputs inp;
            inp.n = n;
            inp.gamma = gamma;
            inp.delta_tol = 0.002;
            inp.delta_iid = 0.0;
            inp.eps = default_ledger();
            inp.ec_max = 12345;
            inp.tuning.alpha = 1.0 + 3e-6;
            inp.tuning.alpha_prime = 1.0 + 3e-5;
            inp.tuning.beta = g(1.0) - 1e-6;
            const auto coll = key_length_collective(inp, g, 0.797);
            const auto gen = key_length_general(inp, g, 0.797);
            CHECK(coll.key_length >= gen);
        }
    }
}

TEST_CASE("collective eps_iid decreases in delta_iid") {
    const auto lp = paper0();
    const Affine g = g_of_w(lp, lp, 0.01);
    FiniteSizeInputs inp;
    inp.n = 1e8;
    inp.gamma = 0.01;
    inp.delta_tol = 0.002;
    inp.eps = default_ledger();
    inp.tuning.beta = g(1.0) - 1e-6;
    double prev = 2.0;
    for (double di : {0.001, 0.003, 0.01, 0.03}) {
        inp.delta_iid = di;
        const auto res = key_length_collective(inp, g, 0.797);
        CHECK(res.eps_iid <= prev + 1e-15);
        prev = res.eps_iid;
    }
}

TEST_CASE("collective key length collapses as delta_iid approaches its cap") {
    const auto lp = paper0();
    const Affine g = g_of_w(lp, lp, 0.01);
    FiniteSizeInputs inp;
    inp.n = 1e8;
    inp.gamma = 0.01;
    inp.delta_tol = 0.002;
    inp.eps = default_ledger();
    inp.tuning.beta = g(1.0) - 1e-6;
    inp.delta_iid = 0.797 - inp.delta_tol - 1e-9;
    const auto res = key_length_collective(inp, g, 0.797);
    CHECK(res.key_length == 0);
    inp.delta_iid = 0.797 - inp.delta_tol + 1e-9;
    CHECK_THROWS_AS(key_length_collective(inp, g, 0.797), std::invalid_argument);
}

TEST_CASE("fixed-test-subset protocol beats the random-test bounds by orders of magnitude") {
    FiniteSizeInputs inp;
    inp.n = 1e7;
    inp.gamma = 0.1;
    inp.delta_tol = 0.002;
    inp.delta_iid = 0.002;
    inp.eps = default_ledger();
    const auto lp = paper0();
    const Affine g = g_of_w(lp, lp, inp.gamma);
    inp.tuning.beta = g(1.0) - 1e-6;
    const auto coll = key_length_collective(inp, g, 0.777);
    const auto opt = key_length_optcoll(inp, lp, 0.777);
    CHECK(opt.eps_iid > 0.0);
    CHECK(opt.eps_iid < 1e-3 * coll.eps_iid);
}

TEST_CASE("optcoll key length vanishes at gamma near 1") {
    FiniteSizeInputs inp;
    inp.n = 1e7;
    inp.gamma = 0.999999;
    inp.delta_tol = 0.002;
    inp.delta_iid = 0.002;
    inp.eps = default_ledger();
    const auto res = key_length_optcoll(inp, paper0(), 0.797);
    CHECK(res.key_length == 0);
}

TEST_CASE("asymptotic rate values") {
    const auto lp = paper0();
    const auto m = devices::depolarizing_model(0.0, 0.0, 0.01);
    CHECK(asymptotic_rate(lp, m, Protocol::standard) ==
          doctest::Approx(0.490644139224).epsilon(1e-9));
    CHECK(asymptotic_rate(lp, m, Protocol::preshared) ==
          doctest::Approx(2.0 * 0.490644139224).epsilon(1e-9));
}

TEST_CASE("net pre-shared rate doubles the standard rate") {
    for (double q : {0.02, 0.05, 0.08}) {
        const auto lp = paper0();
        const auto m = devices::depolarizing_model(q, 0.0, 0.01);
        const double std_rate = asymptotic_rate(lp, m, Protocol::standard);
        const double net_pre = asymptotic_rate(lp, m, Protocol::preshared);
        CHECK(std_rate > 0.0);
        CHECK(net_pre / std_rate == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("optimizer returns audited ledgers and monotone key length") {
    const auto lp = paper0();
    const auto model = devices::generic_model(0.797, 0.06, 0.0, 0.01);
    OptimizeTargets targets;
    int64_t prev = -1;
    for (double n : {2e8, 5e8, 1e9}) {
        const auto res = optimize_params(n, model, lp, lp, targets, Theorem::general);
        CHECK(res.feasible);
        CHECK(res.key_length >= prev);
        prev = res.key_length;
        // post-hoc audit
        const auto& e = res.inputs.eps;
        CHECK(e.eps_s > e.eps_s1 + 2.0 * e.eps_s2);
        CHECK(res.sound <= targets.eps_sou + 1e-15);
        CHECK(res.complete <= targets.eps_com + 1e-12);
        CHECK(soundness_of(Theorem::general, e, 0.0) == doctest::Approx(res.sound));
    }
}

TEST_CASE("optimizer reports zero on tiny n") {
    const auto lp = paper0();
    const auto model = devices::generic_model(0.797, 0.06, 0.0, 0.01);
    const auto res = optimize_params(1e3, model, lp, lp, OptimizeTargets{}, Theorem::general);
    CHECK(res.key_length == 0);
}

TEST_CASE("preshared bound tends to 1 + lin_p and matches its general-form definition") {
    const auto lp = paper0();
    // gamma -> 0: the accumulated bound per round tends to 1 + lin_p(w)
    const Affine gt0 = g_tilde_of_w(lp, lp, 1e-12);
    CHECK(1.0 + gt0(0.78) == doctest::Approx(1.0 + lp.at_w(0.78)).epsilon(1e-9));

    // and the named operation is the general form with the shifted affine,
    // the enlarged output dimension, and the shifted beta bracket
    const double gamma = 0.01;
    const Affine gt = g_tilde_of_w(lp, lp, gamma);
    FiniteSizeInputs inp;
    inp.n = 1e10;
    inp.gamma = gamma;
    inp.delta_tol = 1e-3;
    inp.eps = default_ledger();
    inp.ec_max = 12345;
    inp.tuning.alpha = 1.0 + 1e-6;
    inp.tuning.alpha_prime = 1.0 + 1e-5;
    inp.tuning.beta = 1.0 + gt(1.0) - 1e-6;
    Affine shifted = gt;
    shifted.intercept += 1.0;
    CHECK(key_length_preshared(inp, gt, 0.797) ==
          key_length_general(inp, shifted, 0.797, dim_s_log_preshared()));
    CHECK(key_length_preshared(inp, gt, 0.797) > 0);

    // beta outside [1 + g~(0), 1 + g~(1)] is rejected
    FiniteSizeInputs bad = inp;
    bad.tuning.beta = 1.0 + gt(0.0) - 1.0;  // below the shifted bracket
    CHECK_THROWS_AS(key_length_preshared(bad, gt, 0.797), std::invalid_argument);
}

TEST_CASE("optimizer handles the pre-shared and collective variants") {
    const auto lp = paper0();
    const auto hbd = devices::generic_model(0.797, 0.06, 0.0, 0.01);
    OptimizeTargets targets;

    const auto pre = optimize_params(1e9, hbd, lp, lp, targets, Theorem::preshared);
    CHECK(pre.feasible);
    CHECK(pre.key_length > static_cast<int64_t>(1e9));  // positive net of the seed
    CHECK(pre.sound <= targets.eps_sou + 1e-15);

    const auto gen = optimize_params(1e9, hbd, lp, lp, targets, Theorem::general);
    const auto coll = optimize_params(1e9, hbd, lp, lp, targets, Theorem::collective);
    CHECK(coll.feasible);
    CHECK(coll.key_length >= gen.key_length);  // IID assumption can only help
    CHECK(soundness_of(Theorem::collective, coll.inputs.eps, coll.eps_iid) <=
          targets.eps_sou + 1e-15);
}

TEST_CASE("fixed-subset collective protocol needs far fewer rounds") {
    const auto lp = paper0();
    const auto rbg = devices::generic_model(0.777, 0.035, 0.0, 0.01);
    OptimizeTargets targets;
    // positive well below the general-attack requirement of ~1e10
    const auto opt = optimize_params(1e8, rbg, lp, lp, targets, Theorem::optcoll);
    CHECK(opt.feasible);
    CHECK(opt.key_length > 0);
    CHECK(soundness_of(Theorem::optcoll, opt.inputs.eps, opt.eps_iid) <= targets.eps_sou + 1e-15);
    const auto gen = optimize_params(1e8, rbg, lp, lp, targets, Theorem::general);
    CHECK(gen.key_length == 0);
}

TEST_CASE("keyrate curve approaches the asymptote from below, monotonically") {
    const auto lp = paper0();
    const auto model = devices::depolarizing_model(0.05, 0.0, 0.01);
    const double asym = asymptotic_rate(lp, model, Protocol::standard);
    double prev = -1.0;
    for (double e = 8.5; e <= 10.51; e += 0.25) {
        const double n = std::pow(10.0, e);
        const auto res = optimize_params(n, model, lp, lp, OptimizeTargets{}, Theorem::general);
        const double rate = res.key_length / n;
        CHECK(rate <= asym);
        CHECK(rate >= prev - 1e-9);
        prev = rate;
    }
    CHECK(prev > 0.5 * asym);
}
