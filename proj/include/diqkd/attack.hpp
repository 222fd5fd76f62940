#pragma once

namespace diqkd::attack {

// Largest depolarizing noise at which real projective measurements on the
// Werner state still violate CHSH: (2 - sqrt 2)/4.
double q_critical();

// Documented context constants; no computation depends on them.
// LHV thresholds for general projective measurements and POVMs on the
// Werner state.
constexpr double kQ3Approx = 0.159;
constexpr double kQPovmApprox = 0.273;

// Convex-mixture LHV attack at depolarizing noise q and preprocessing bias p.
struct AttackEvaluation {
    double q = 0.0;
    double p = 0.0;
    double p_bell = 0.0;  // weight of the entangled branch, (q2 - q)/q2 clamped
    double h_eve = 0.0;   // p_bell + (1 - p_bell) h(p)
    double h_bob = 0.0;   // h(p + (1 - 2p) q)
    bool full_lhv = false;  // q exceeded q2, p_bell clamped to 0
};

AttackEvaluation attack_entropies(double q, double p);

// Largest q with h_eve - h_bob >= 0, by bisection on [0, q2] to 1e-10.
// A sign audit precedes the bisection and rejects inputs without a single
// crossing on the bracket.
double q_att(double p);

// Closed-form limit of q_att(p) as p -> 1/2:
// (1 + 4 q2 - sqrt(8 q2 + 1)) / (8 q2) = 1 - (sqrt(7 + 4 sqrt 2) - 1)/(2 sqrt 2).
double q_att_limit();

}  // namespace diqkd::attack
