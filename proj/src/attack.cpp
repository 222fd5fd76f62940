#include "diqkd/attack.hpp"

#include <cmath>
#include <stdexcept>

#include "diqkd/linalg.hpp"

namespace diqkd::attack {

using linalg::binary_entropy;

double q_critical() { return (2.0 - std::sqrt(2.0)) / 4.0; }

AttackEvaluation attack_entropies(double q, double p) {
    if (q < 0.0 || q > 0.5) throw std::invalid_argument("attack_entropies: q outside [0, 1/2]");
    if (p < 0.0 || p > 0.5) throw std::invalid_argument("attack_entropies: p outside [0, 1/2]");
    const double q2 = q_critical();
    AttackEvaluation ev;
    ev.q = q;
    ev.p = p;
    ev.full_lhv = q > q2;
    ev.p_bell = ev.full_lhv ? 0.0 : (q2 - q) / q2;
    ev.h_eve = ev.p_bell + (1.0 - ev.p_bell) * binary_entropy(p);
    ev.h_bob = binary_entropy(p + (1.0 - 2.0 * p) * q);
    return ev;
}

double q_att(double p) {
    if (p < 0.0 || p >= 0.5) throw std::invalid_argument("q_att: p outside [0, 1/2)");
    const double q2 = q_critical();
    auto margin = [&](double q) {
        const AttackEvaluation ev = attack_entropies(q, p);
        return ev.h_eve - ev.h_bob;
    };
    // Sign audit: positive at q = 0, negative at q = q2, single crossing.
    const double at_lo = margin(0.0);
    const double at_hi = margin(q2);
    if (!(at_lo > 0.0) || !(at_hi < 0.0))
        throw std::runtime_error("q_att: margin does not change sign on [0, q2]");
    int crossings = 0;
    double prev = at_lo;
    for (int i = 1; i <= 64; ++i) {
        const double cur = margin(q2 * i / 64.0);
        if (prev > 0.0 && cur <= 0.0) ++crossings;
        if (prev <= 0.0 && cur > 0.0)
            throw std::runtime_error("q_att: margin is not single-crossing on [0, q2]");
        prev = cur;
    }
    if (crossings != 1) throw std::runtime_error("q_att: margin is not single-crossing on [0, q2]");

    double lo = 0.0, hi = q2;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (margin(mid) >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double q_att_limit() {
    const double q2 = q_critical();
    return (1.0 + 4.0 * q2 - std::sqrt(8.0 * q2 + 1.0)) / (8.0 * q2);
}

}  // namespace diqkd::attack
