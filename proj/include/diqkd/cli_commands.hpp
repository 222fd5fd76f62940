#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "json.hpp"

namespace diqkd::cli {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

struct JobConfig {
    nlohmann::json params;  // command-specific parameters
    uint64_t seed = 1;
    int threads = 1;
};

// Round to 12 significant digits; applied to every serialized number.
double round12(double x);

// Certified single-round bound; writes a CertifiedValue JSON document.
int cmd_certify(const JobConfig& cfg, std::ostream& out, std::ostream& err);

// Finite-size keyrate curve over a log grid of n; writes CSV.
int cmd_keyrate(const JobConfig& cfg, std::ostream& out, std::ostream& err);

// Depolarizing-noise threshold of the asymptotic rate; writes JSON.
int cmd_threshold(const JobConfig& cfg, std::ostream& out, std::ostream& err);

// LHV attack bound; writes JSON {p, q_att, q_att_limit}.
int cmd_attack(const JobConfig& cfg, std::ostream& out, std::ostream& err);

// Monte-Carlo honest-device abort frequency against the analytic bound.
int cmd_simulate(const JobConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace diqkd::cli
