#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "diqkd/cli_commands.hpp"

namespace {

using diqkd::cli::JobConfig;

int run(int argc, char** argv) {
    CLI::App app{"Device-independent QKD keyrate engine"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_path;
    uint64_t seed = 1;
    int threads = 1;
    app.add_option("--config", config_path, "JSON config file")->capture_default_str();
    app.add_option("--out", out_path, "output path (default stdout)");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed")->capture_default_str();
    auto* threads_opt =
        app.add_option("--threads", threads, "worker count")->capture_default_str();

    // Common overrides merged on top of the config file.
    nlohmann::json overrides;
    auto add_num = [&](CLI::App* sub, const std::string& name, const std::string& help) {
        std::string key = name;
        for (char& c : key)
            if (c == '-') c = '_';
        sub->add_option_function<double>(
            "--" + name, [&overrides, key](double v) { overrides[key] = v; }, help);
    };

    CLI::App* certify = app.add_subcommand("certify", "certified single-round entropy bound");
    add_num(certify, "p", "preprocessing bias");
    add_num(certify, "lambda", "CHSH Lagrange multiplier");
    add_num(certify, "gap-tol", "target feasible-certified gap");
    certify->add_option_function<long>(
        "--budget", [&overrides](long v) { overrides["budget"] = v; }, "leaf solve budget");

    CLI::App* keyrate = app.add_subcommand("keyrate", "finite-size keyrate curve (CSV)");
    add_num(keyrate, "q", "depolarizing noise");
    add_num(keyrate, "w_exp", "honest win probability");
    add_num(keyrate, "p_err", "honest generation error");
    add_num(keyrate, "p", "preprocessing bias");
    add_num(keyrate, "gamma", "test probability (must be positive if given)");
    add_num(keyrate, "eps_sou", "soundness target");
    add_num(keyrate, "eps_com", "completeness target");
    add_num(keyrate, "n_min", "smallest n");
    add_num(keyrate, "n_max", "largest n");
    keyrate->add_option_function<std::string>(
        "--theorem", [&overrides](const std::string& v) { overrides["theorem"] = v; },
        "general|preshared|collective|optcoll");

    CLI::App* threshold = app.add_subcommand("threshold", "asymptotic noise threshold");
    add_num(threshold, "p", "preprocessing bias");
    add_num(threshold, "lambda", "bound slope override");
    add_num(threshold, "intercept", "bound intercept override");

    CLI::App* attack = app.add_subcommand("attack", "LHV attack upper bound");
    add_num(attack, "p", "preprocessing bias");

    CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo completeness check");
    add_num(simulate, "q", "depolarizing noise");
    add_num(simulate, "w_exp", "honest win probability");
    add_num(simulate, "p_err", "honest generation error");
    add_num(simulate, "gamma", "test probability");
    add_num(simulate, "delta_tol", "tolerated deviation");
    simulate->add_option_function<long>(
        "--n", [&overrides](long v) { overrides["n"] = v; }, "rounds per trial");
    simulate->add_option_function<long>(
        "--trials", [&overrides](long v) { overrides["trials"] = v; }, "Monte-Carlo trials");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : diqkd::cli::kExitUsage;
    }

    JobConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config " << config_path << "\n";
            return diqkd::cli::kExitUsage;
        }
        try {
            in >> cfg.params;
        } catch (const std::exception& e) {
            std::cerr << "error: bad config: " << e.what() << "\n";
            return diqkd::cli::kExitUsage;
        }
    }
    for (auto& [k, v] : overrides.items()) cfg.params[k] = v;
    cfg.seed = seed;
    cfg.threads = threads;
    // config-file seed/threads apply unless the flags were given
    if (seed_opt->count() == 0 && cfg.params.contains("seed"))
        cfg.seed = cfg.params.at("seed").get<uint64_t>();
    if (threads_opt->count() == 0 && cfg.params.contains("threads"))
        cfg.threads = cfg.params.at("threads").get<int>();

    std::ostringstream buffer;
    int rc;
    if (app.got_subcommand(certify))
        rc = diqkd::cli::cmd_certify(cfg, buffer, std::cerr);
    else if (app.got_subcommand(keyrate))
        rc = diqkd::cli::cmd_keyrate(cfg, buffer, std::cerr);
    else if (app.got_subcommand(threshold))
        rc = diqkd::cli::cmd_threshold(cfg, buffer, std::cerr);
    else if (app.got_subcommand(attack))
        rc = diqkd::cli::cmd_attack(cfg, buffer, std::cerr);
    else
        rc = diqkd::cli::cmd_simulate(cfg, buffer, std::cerr);

    if (rc != 0) return rc;
    if (out_path.empty()) {
        std::cout << buffer.str();
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return diqkd::cli::kExitUsage;
        }
        out << buffer.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return diqkd::cli::kExitUsage;
    }
}
