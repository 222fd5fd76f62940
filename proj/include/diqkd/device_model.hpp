#pragma once

#include <cstdint>
#include <optional>

namespace diqkd::devices {

// Symmetric IID honest-device characterization: every test-input pair wins
// with probability w_exp, generation rounds disagree with probability p_err
// before preprocessing, and all marginals are uniform.
struct HonestDeviceModel {
    double w_exp = 0.0;    // CHSH win probability of the honest devices
    double p_err = 0.0;    // generation-round disagreement before preprocessing
    std::optional<double> q;  // depolarizing parameter, when applicable
    double p = 0.0;        // noisy-preprocessing bias
    double gamma = 0.0;    // test-round probability
};

// Error-correction sizing model.
struct EcModel {
    enum class Mode { optimal, practical };
    Mode mode = Mode::optimal;
    double xi = 1.1;           // practical-mode inefficiency, >= 1
    double eps_ec_com = 1e-2;  // completeness share of the EC step
    double eps0 = 1e-3;        // smoothing split, < eps_ec_com
};

// Werner-state devices with ideal CHSH measurements.
HonestDeviceModel depolarizing_model(double q, double p, double gamma);

// General model from (w_exp, p_err) directly.
HonestDeviceModel generic_model(double w_exp, double p_err, double p, double gamma);

// Per-round conditional entropy H(A|B X Y) of the honest devices:
// (1-gamma)/2 h(p + (1-2p) p_err) + gamma h(w_exp).
double h_hon(const HonestDeviceModel& model);

// Variant with generation weight (1-gamma) per the pre-shared-key protocol.
double h_hon_preshared(const HonestDeviceModel& model);

// Generation-rounds-only entropy h(p + (1-2p) p_err).
double h_hon_generation_only(const HonestDeviceModel& model);

// Error-correction bit budget for n rounds with per-round entropy h.
// optimal:   ceil(n h + sqrt(n) (2 log2 5) sqrt(log2(2/eps0^2))
//                 + 2 log2(1/(eps_ec_com - eps0)) + 4)
// practical: ceil(xi n h)
// A deterministic source (h == 0) needs no max-entropy budget in optimal mode.
int64_t ec_max(const EcModel& ec, double n, double h);

struct HonestCounts {
    int64_t wins = 0;    // test rounds won
    int64_t losses = 0;  // test rounds lost
    int64_t tests = 0;   // test rounds total
};

// Per-round IID simulation of the honest devices: each round is a test round
// with probability gamma and a won test with probability w_exp given that.
HonestCounts simulate_honest_counts(const HonestDeviceModel& model, int64_t n, uint64_t seed);

}  // namespace diqkd::devices
