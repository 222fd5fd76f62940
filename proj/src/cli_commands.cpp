#include "diqkd/cli_commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "diqkd/attack.hpp"
#include "diqkd/finite_size.hpp"
#include "diqkd/paper_bounds.hpp"
#include "diqkd/stats.hpp"
#include "diqkd/thread_pool.hpp"

namespace diqkd::cli {

using nlohmann::json;

double round12(double x) {
    if (!std::isfinite(x)) return x;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::strtod(buf, nullptr);
}

namespace {

devices::HonestDeviceModel model_from_json(const json& j) {
    const double p = j.value("p", 0.0);
    const double gamma = j.value("gamma", 0.01);
    if (j.contains("q")) return devices::depolarizing_model(j.at("q").get<double>(), p, gamma);
    return devices::generic_model(j.at("w_exp").get<double>(), j.at("p_err").get<double>(), p,
                                  gamma);
}

devices::EcModel ec_from_json(const json& j) {
    devices::EcModel ec;
    if (!j.contains("ec")) return ec;
    const json& e = j.at("ec");
    const std::string mode = e.value("mode", "optimal");
    if (mode == "practical")
        ec.mode = devices::EcModel::Mode::practical;
    else if (mode != "optimal")
        throw std::invalid_argument("ec.mode must be optimal or practical");
    ec.xi = e.value("xi", ec.xi);
    ec.eps_ec_com = e.value("eps_ec_com", ec.eps_ec_com);
    ec.eps0 = e.value("eps0", ec.eps0);
    return ec;
}

certify::AffineEntropyBound bound_from_json(const json& j, double p) {
    if (j.contains("lambda") && j.contains("intercept"))
        return certify::affine_bound(j.at("lambda").get<double>(), j.at("intercept").get<double>(),
                                     p, j.value("certified", false));
    auto rec = certify::paper_bound_for(p);
    if (!rec)
        throw std::invalid_argument("no built-in bound for p=" + std::to_string(p) +
                                    "; pass lambda and intercept");
    return *rec;
}

json state_to_json(const certify::StructuredState& s) {
    return json{{"L_phi_plus", round12(s.L_phi_plus)}, {"L_psi_minus", round12(s.L_psi_minus)},
                {"L_phi_minus", round12(s.L_phi_minus)}, {"L_psi_plus", round12(s.L_psi_plus)},
                {"l1", round12(s.l1)},                 {"l2", round12(s.l2)}};
}

finitesize::Theorem theorem_from_string(const std::string& s) {
    if (s == "general") return finitesize::Theorem::general;
    if (s == "preshared") return finitesize::Theorem::preshared;
    if (s == "collective") return finitesize::Theorem::collective;
    if (s == "optcoll") return finitesize::Theorem::optcoll;
    throw std::invalid_argument("theorem must be general|preshared|collective|optcoll");
}

int usage_error(std::ostream& err, const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
}

}  // namespace

int cmd_certify(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
    certify::ObjectiveSpec spec;
    double gap_tol;
    long budget;
    try {
        const json& j = cfg.params;
        spec.p = j.value("p", 0.0);
        if (j.contains("lambda_vec")) {
            const auto v = j.at("lambda_vec").get<std::vector<double>>();
            if (v.size() != 4) throw std::invalid_argument("lambda_vec must have 4 entries");
            spec.lambda = {v[0], v[1], v[2], v[3], false};
        } else {
            spec.lambda = certify::LagrangeVector::chsh(j.value("lambda", 0.0));
        }
        if (j.contains("weights")) {
            const auto w = j.at("weights").get<std::vector<double>>();
            if (w.size() != 2) throw std::invalid_argument("weights must have 2 entries");
            spec.w0 = w[0];
            spec.w1 = w[1];
        }
        spec.validate();
        gap_tol = j.value("gap_tol", 0.025);
        budget = j.value("budget", 4000L);
        if (gap_tol <= 0.0) throw std::invalid_argument("gap_tol must be positive");
        if (budget < 1) throw std::invalid_argument("budget must be >= 1");
    } catch (const std::exception& e) {
        return usage_error(err, e);
    }

    certify::CertifyOptions opts;
    opts.threads = cfg.threads;
    opts.seed = cfg.seed;
    const auto t0 = std::chrono::steady_clock::now();
    const certify::CertifiedValue res = certify::certify_c_lambda(spec, gap_tol, budget, opts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double two_lambda = spec.lambda.l00 + spec.lambda.l01 + spec.lambda.l10 - spec.lambda.l11;
    json o;
    o["p"] = round12(spec.p);
    o["lambda"] = {round12(spec.lambda.l00), round12(spec.lambda.l01), round12(spec.lambda.l10),
                   round12(spec.lambda.l11)};
    o["weights"] = {round12(spec.w0), round12(spec.w1)};
    o["lower_bound"] = round12(res.lower_bound);
    o["feasible_value"] = round12(res.feasible_value);
    o["gap"] = round12(res.gap);
    o["converged"] = res.converged;
    o["iterations"] = res.iterations;
    // Intercept of the induced affine bound at CHSH value 2 (CHSH-restricted
    // lambda vectors only; two_lambda is then 2 lambda).
    if (spec.lambda.chsh_restricted) {
        o["intercept_at_nu2"] = round12(res.lower_bound + two_lambda);
        o["feasible_intercept_at_nu2"] = round12(res.feasible_value + two_lambda);
    }
    o["argmin"] = {{"theta_a", round12(res.argmin_theta_a)},
                   {"r_z", round12(res.argmin_r.r_z)},
                   {"r_x", round12(res.argmin_r.r_x)},
                   {"state", state_to_json(res.argmin_state)}};
    out << o.dump(2) << "\n";
    err << "wall_time_s " << secs << "\n";  // timing stays off the deterministic payload
    return kExitOk;
}

int cmd_threshold(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
    double p;
    certify::AffineEntropyBound bound;
    try {
        p = cfg.params.value("p", 0.0);
        bound = bound_from_json(cfg.params, p);
    } catch (const std::exception& e) {
        return usage_error(err, e);
    }

    auto rate = [&](double q) {
        const auto model = devices::depolarizing_model(q, p, 0.01);
        return finitesize::asymptotic_rate(bound, model, finitesize::Protocol::standard);
    };
    double q_thr = 0.0;
    if (rate(0.0) > 0.0) {
        double lo = 0.0, hi = 0.5;
        if (rate(hi) >= 0.0) {
            q_thr = hi;
        } else {
            while (hi - lo > 1e-6) {
                const double mid = 0.5 * (lo + hi);
                if (rate(mid) > 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            q_thr = 0.5 * (lo + hi);
        }
    }
    json o{{"p", round12(p)}, {"q_threshold", round12(q_thr)}};
    out << o.dump(2) << "\n";
    return kExitOk;
}

int cmd_attack(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
    double p;
    try {
        p = cfg.params.value("p", 0.0);
        if (p < 0.0 || p >= 0.5) throw std::invalid_argument("p must be in [0, 1/2)");
    } catch (const std::exception& e) {
        return usage_error(err, e);
    }
    json o{{"p", round12(p)},
           {"q_att", round12(attack::q_att(p))},
           {"q_att_limit", round12(attack::q_att_limit())}};
    out << o.dump(2) << "\n";
    return kExitOk;
}

int cmd_keyrate(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
    devices::HonestDeviceModel model;
    finitesize::Theorem theorem;
    finitesize::OptimizeTargets targets;
    certify::AffineEntropyBound lin_p, lin_0;
    double n_min, n_max;
    int per_decade;
    try {
        const json& j = cfg.params;
        model = model_from_json(j);
        if (j.contains("gamma") && j.at("gamma").get<double>() <= 0.0)
            throw std::invalid_argument("gamma must be positive");
        theorem = theorem_from_string(j.value("theorem", "general"));
        targets.eps_sou = j.value("eps_sou", 1e-6);
        targets.eps_com = j.value("eps_com", 1e-2);
        lin_p = bound_from_json(j, model.p);
        lin_0 = bound_from_json(j, 0.0);
        n_min = j.value("n_min", 1e7);
        n_max = j.value("n_max", 1e9);
        per_decade = j.value("points_per_decade", 20);
        if (n_min < 1.0 || n_max < n_min || per_decade < 1)
            throw std::invalid_argument("invalid n grid");
    } catch (const std::exception& e) {
        return usage_error(err, e);
    }

    std::vector<double> ns;
    int k_lo = static_cast<int>(std::ceil(std::log10(n_min) * per_decade - 1e-9));
    int k_hi = static_cast<int>(std::floor(std::log10(n_max) * per_decade + 1e-9));
    if (k_lo > k_hi)  // no grid point inside [n_min, n_max]: take the nearest
        k_lo = k_hi = static_cast<int>(std::lround(std::log10(n_min) * per_decade));
    for (int k = k_lo; k <= k_hi; ++k) ns.push_back(std::round(std::pow(10.0, double(k) / per_decade)));

    const devices::EcModel ec = ec_from_json(cfg.params);
    std::vector<finitesize::OptimizeResult> rows(ns.size());
    parallel_for(ns.size(), cfg.threads, [&](size_t i) {
        rows[i] = finitesize::optimize_params(ns[i], model, lin_p, lin_0, targets, theorem, ec);
    });
    bool any_feasible = false;
    for (const auto& r : rows) any_feasible = any_feasible || r.feasible;

    const auto proto_sel = theorem == finitesize::Theorem::preshared
                               ? finitesize::Protocol::preshared
                               : finitesize::Protocol::standard;
    if (cfg.params.value("format", "csv") == "json") {
        json arr = json::array();
        for (size_t i = 0; i < ns.size(); ++i) {
            const auto& r = rows[i];
            const auto& e = r.inputs.eps;
            arr.push_back(json{{"n", ns[i]},
                               {"keyrate", round12(r.key_length / ns[i])},
                               {"key_length", r.key_length},
                               {"gamma", round12(r.inputs.gamma)},
                               {"delta_tol", round12(r.inputs.delta_tol)},
                               {"delta_iid", round12(r.inputs.delta_iid)},
                               {"alpha", round12(r.inputs.tuning.alpha)},
                               {"alpha_prime", round12(r.inputs.tuning.alpha_prime)},
                               {"beta", round12(r.inputs.tuning.beta)},
                               {"ec_max", r.inputs.ec_max},
                               {"eps",
                                json{{"ec_com", round12(e.eps_ec_com)},
                                     {"pe_com", round12(e.eps_pe_com)},
                                     {"ea", round12(e.eps_ea)},
                                     {"pa", round12(e.eps_pa)},
                                     {"h", round12(e.eps_h)},
                                     {"s", round12(e.eps_s)},
                                     {"s1", round12(e.eps_s1)},
                                     {"s2", round12(e.eps_s2)}}},
                               {"eps_iid", round12(r.eps_iid)},
                               {"feasible", r.feasible}});
        }
        json o{{"rows", arr},
               {"asymptotic_rate",
                round12(finitesize::asymptotic_rate(lin_p, model, proto_sel))}};
        out << o.dump(2) << "\n";
        return any_feasible ? kExitOk : kExitInfeasible;
    }

    out << "n,keyrate,gamma,delta_tol,alpha,alpha_prime,beta,eps_ec_com,eps_pe_com,eps_ea,"
           "eps_pa,eps_h,eps_s,eps_s1,eps_s2,delta_iid,eps_iid,ec_max,key_length\n";
    char line[1024];
    for (size_t i = 0; i < ns.size(); ++i) {
        const auto& r = rows[i];
        const auto& e = r.inputs.eps;
        std::snprintf(line, sizeof(line),
                      "%.0f,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,"
                      "%.12g,%.12g,%.12g,%.12g,%.12g,%lld,%lld\n",
                      ns[i], r.key_length / ns[i], r.inputs.gamma, r.inputs.delta_tol,
                      r.inputs.tuning.alpha, r.inputs.tuning.alpha_prime, r.inputs.tuning.beta,
                      e.eps_ec_com, e.eps_pe_com, e.eps_ea, e.eps_pa, e.eps_h, e.eps_s, e.eps_s1,
                      e.eps_s2, r.inputs.delta_iid, r.eps_iid,
                      static_cast<long long>(r.inputs.ec_max),
                      static_cast<long long>(r.key_length));
        out << line;
    }
    std::snprintf(line, sizeof(line), "# asymptote,%.12g\n",
                  finitesize::asymptotic_rate(lin_p, model, proto_sel));
    out << line;
    return any_feasible ? kExitOk : kExitInfeasible;
}

int cmd_simulate(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
    devices::HonestDeviceModel model;
    int64_t n;
    int trials;
    double delta_tol;
    try {
        const json& j = cfg.params;
        model = model_from_json(j);
        n = j.value("n", int64_t{1000000});
        trials = j.value("trials", 10000);
        delta_tol = j.at("delta_tol").get<double>();
        if (n < 1 || trials < 1 || delta_tol <= 0.0)
            throw std::invalid_argument("need n >= 1, trials >= 1, delta_tol > 0");
    } catch (const std::exception& e) {
        return usage_error(err, e);
    }

    const double thr_win = (model.w_exp - delta_tol) * model.gamma;
    const double thr_loss = (1.0 - model.w_exp + delta_tol) * model.gamma;
    std::vector<uint8_t> aborted(trials, 0);
    parallel_for(static_cast<size_t>(trials), cfg.threads, [&](size_t t) {
        const auto c = devices::simulate_honest_counts(model, n, cfg.seed + t);
        const double fw = static_cast<double>(c.wins) / n;
        const double fl = static_cast<double>(c.losses) / n;
        aborted[t] = (fw < thr_win || fl > thr_loss) ? 1 : 0;
    });
    int64_t aborts = 0;
    for (uint8_t a : aborted) aborts += a;
    const double freq = static_cast<double>(aborts) / trials;
    const double bound = finitesize::completeness_pe_general(static_cast<double>(n), model.gamma,
                                                             model.w_exp, delta_tol);
    const double se = std::sqrt(std::max(freq * (1.0 - freq), 1.0 / trials) / trials);

    json o{{"n", n},
           {"trials", trials},
           {"gamma", round12(model.gamma)},
           {"w_exp", round12(model.w_exp)},
           {"delta_tol", round12(delta_tol)},
           {"aborts", aborts},
           {"abort_freq", round12(freq)},
           {"completeness_bound", round12(bound)},
           {"mc_stderr", round12(se)},
           {"within_bound", freq <= bound + 3.0 * se}};
    out << o.dump(2) << "\n";
    return kExitOk;
}

}  // namespace diqkd::cli
