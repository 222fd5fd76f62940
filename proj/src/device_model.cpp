#include "diqkd/device_model.hpp"

#include <cmath>
#include <stdexcept>

#include "diqkd/linalg.hpp"
#include "diqkd/rng.hpp"

namespace diqkd::devices {

using linalg::binary_entropy;

static void check_common(double p, double gamma) {
    if (p < 0.0 || p > 0.5) throw std::invalid_argument("preprocessing bias p must be in [0, 1/2]");
    if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must be in [0, 1]");
}

HonestDeviceModel depolarizing_model(double q, double p, double gamma) {
    if (q < 0.0 || q > 0.5) throw std::invalid_argument("depolarizing q must be in [0, 1/2]");
    check_common(p, gamma);
    HonestDeviceModel m;
    m.q = q;
    m.w_exp = (1.0 - 2.0 * q) * (2.0 + std::sqrt(2.0)) / 4.0 + 2.0 * q * 0.5;
    m.p_err = q;
    m.p = p;
    m.gamma = gamma;
    return m;
}

HonestDeviceModel generic_model(double w_exp, double p_err, double p, double gamma) {
    if (w_exp < 0.5 || w_exp > (2.0 + std::sqrt(2.0)) / 4.0 + 1e-12)
        throw std::invalid_argument("w_exp must be in [1/2, (2+sqrt(2))/4]");
    if (p_err < 0.0 || p_err > 0.5) throw std::invalid_argument("p_err must be in [0, 1/2]");
    check_common(p, gamma);
    HonestDeviceModel m;
    m.w_exp = w_exp;
    m.p_err = p_err;
    m.p = p;
    m.gamma = gamma;
    return m;
}

static double flip_prob(const HonestDeviceModel& m) {
    return m.p + (1.0 - 2.0 * m.p) * m.p_err;
}

double h_hon(const HonestDeviceModel& m) {
    return (1.0 - m.gamma) / 2.0 * binary_entropy(flip_prob(m)) +
           m.gamma * binary_entropy(m.w_exp);
}

double h_hon_preshared(const HonestDeviceModel& m) {
    return (1.0 - m.gamma) * binary_entropy(flip_prob(m)) + m.gamma * binary_entropy(m.w_exp);
}

double h_hon_generation_only(const HonestDeviceModel& m) { return binary_entropy(flip_prob(m)); }

int64_t ec_max(const EcModel& ec, double n, double h) {
    if (n < 1.0) throw std::invalid_argument("ec_max: n must be >= 1");
    if (h < 0.0) throw std::invalid_argument("ec_max: negative entropy");
    if (ec.mode == EcModel::Mode::practical) {
        if (ec.xi < 1.0) throw std::invalid_argument("ec_max: xi must be >= 1");
        return static_cast<int64_t>(std::ceil(ec.xi * n * h));
    }
    if (ec.eps0 <= 0.0 || ec.eps0 >= ec.eps_ec_com)
        throw std::invalid_argument("ec_max: need 0 < eps0 < eps_ec_com");
    double bits = 2.0 * std::log2(1.0 / (ec.eps_ec_com - ec.eps0)) + 4.0;
    if (h > 0.0) {
        const double eta0 = std::log2(2.0 / (ec.eps0 * ec.eps0));
        bits += n * h + std::sqrt(n) * 2.0 * std::log2(5.0) * std::sqrt(eta0);
    }
    return static_cast<int64_t>(std::ceil(bits));
}

HonestCounts simulate_honest_counts(const HonestDeviceModel& model, int64_t n, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate_honest_counts: n must be >= 1");
    CounterRng rng(seed, /*stream=*/0);
    HonestCounts c;
    for (int64_t i = 0; i < n; ++i) {
        if (!rng.next_bool(model.gamma)) continue;
        ++c.tests;
        if (rng.next_bool(model.w_exp))
            ++c.wins;
        else
            ++c.losses;
    }
    return c;
}

}  // namespace diqkd::devices
