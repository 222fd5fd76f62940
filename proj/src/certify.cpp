#include "diqkd/certify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "diqkd/rng.hpp"
#include "diqkd/thread_pool.hpp"

namespace diqkd::certify {

AffineEntropyBound affine_bound(double lambda, double intercept, double p, bool certified) {
    return {lambda, intercept, p, certified};
}

double continuity_penalty(double delta, const ObjectiveSpec& spec) {
    if (delta < 0.0 || delta > M_PI)
        throw std::invalid_argument("continuity_penalty: delta must be in [0, pi]");
    const double lam_a1 = std::abs(spec.lambda.l10) + std::abs(spec.lambda.l11);
    return 2.012 * spec.w1 * delta + lam_a1 * std::sqrt(std::max(0.0, 2.0 - 2.0 * std::cos(delta)));
}

StructuredState restrict_rank2(const StructuredState& s);

namespace {

// Coefficients (g_z, g_x) of the Bob-vector dependence of the lambda term:
// lambda . Gamma = <theta-part> + r_z g_z + r_x g_x on the given state.
void bob_coefficients(const ObjectiveSpec& spec, double theta_a, const StructuredState& state,
                      double& g_z, double& g_x) {
    const Matrix rho = state.to_density();
    Matrix alice = linalg::pauli_z() * spec.lambda.l01;
    alice += pauli_at_angle(theta_a) * spec.lambda.l11;
    g_z = linalg::real_trace_product(kron(alice, linalg::pauli_z()), rho);
    g_x = linalg::real_trace_product(kron(alice, linalg::pauli_x()), rho);
}

// Maximizer of r . g over the unit semicircular arc (r_x >= 0).
BobVector best_arc_point(double g_z, double g_x) {
    const double n = std::hypot(g_z, g_x);
    if (n < 1e-300) return {1.0, 0.0};
    if (g_x > 0.0) return {g_z / n, g_x / n};
    return {g_z >= 0.0 ? 1.0 : -1.0, 0.0};
}

double golden_min_angle(const std::function<double(double)>& f, double a, double b, int iters) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

StructuredState random_state(CounterRng& rng, bool rank2) {
    StructuredState s;
    s.L_phi_plus = rng.next_double();
    s.L_psi_minus = rng.next_double();
    s.L_phi_minus = rng.next_double();
    s.L_psi_plus = rng.next_double();
    const double tr = s.trace();
    s.L_phi_plus /= tr;
    s.L_psi_minus /= tr;
    s.L_phi_minus /= tr;
    s.L_psi_plus /= tr;
    s.l1 = rng.next_range(-0.5, 0.5);
    s.l2 = rng.next_range(-0.5, 0.5);
    s = s.clipped_to_psd();
    if (rank2) s = restrict_rank2(s);
    return s;
}

HeuristicResult heuristic_restart(const ObjectiveSpec& spec, uint64_t seed, uint64_t stream,
                                  const HeuristicOptions& opts) {
    CounterRng rng(seed, stream);
    HeuristicResult cur;
    cur.theta_a = rng.next_range(0.0, M_PI);
    const double tb = rng.next_range(0.0, M_PI);
    cur.r = {std::cos(tb), std::sin(tb)};
    cur.state = random_state(rng, opts.rank2_restricted);

    for (int round = 0; round < opts.rounds; ++round) {
        // State descent at fixed measurements.
        FrankWolfeOptions fw;
        fw.eps_tol = 1e-6;
        fw.max_iters = opts.fw_iters_per_round;
        fw.initial_state = cur.state;
        CertifiedValue sol = frank_wolfe(spec, cur.theta_a, cur.r, fw);
        cur.state = opts.rank2_restricted ? restrict_rank2(sol.argmin_state) : sol.argmin_state;

        // Closed-form Bob update on the arc.
        double g_z, g_x;
        bob_coefficients(spec, cur.theta_a, cur.state, g_z, g_x);
        cur.r = best_arc_point(g_z, g_x);

        // Alice angle: coarse grid, then local golden refinement.
        auto f_theta = [&](double th) { return eval_fobj(spec, th, cur.r, cur.state); };
        if (spec.w1 > 0.0 || std::abs(spec.lambda.l10) + std::abs(spec.lambda.l11) > 0.0) {
            int best_i = 0;
            double best_f = std::numeric_limits<double>::infinity();
            constexpr int kGrid = 32;
            for (int i = 0; i <= kGrid; ++i) {
                const double th = M_PI * i / kGrid;
                const double f = f_theta(th);
                if (f < best_f) {
                    best_f = f;
                    best_i = i;
                }
            }
            const double lo = M_PI * std::max(0, best_i - 1) / kGrid;
            const double hi = M_PI * std::min(kGrid, best_i + 1) / kGrid;
            cur.theta_a = golden_min_angle(f_theta, lo, hi, 40);
        }
    }
    // Final polish of the state.
    FrankWolfeOptions fw;
    fw.eps_tol = 1e-7;
    fw.max_iters = 4 * opts.fw_iters_per_round;
    fw.initial_state = cur.state;
    CertifiedValue sol = frank_wolfe(spec, cur.theta_a, cur.r, fw);
    cur.state = opts.rank2_restricted ? restrict_rank2(sol.argmin_state) : sol.argmin_state;
    cur.value = eval_fobj(spec, cur.theta_a, cur.r, cur.state);
    return cur;
}

}  // namespace

HeuristicResult heuristic_min(const ObjectiveSpec& spec, int restarts, uint64_t seed,
                              const HeuristicOptions& opts) {
    spec.validate();
    if (restarts < 1) throw std::invalid_argument("heuristic_min: restarts must be >= 1");
    std::vector<HeuristicResult> results(restarts);
    parallel_for(static_cast<size_t>(restarts), opts.threads, [&](size_t i) {
        results[i] = heuristic_restart(spec, seed, i, opts);
    });
    size_t best = 0;
    for (size_t i = 1; i < results.size(); ++i)
        if (results[i].value < results[best].value) best = i;
    HeuristicResult win = results[best];
    // long alternating descent on the winner only
    for (int round = 0; round < 3; ++round) {
        FrankWolfeOptions fw;
        fw.eps_tol = 1e-8;
        fw.max_iters = 8 * opts.fw_iters_per_round;
        fw.initial_state = win.state;
        const CertifiedValue sol = frank_wolfe(spec, win.theta_a, win.r, fw);
        StructuredState polished =
            opts.rank2_restricted ? restrict_rank2(sol.argmin_state) : sol.argmin_state;
        double v = eval_fobj(spec, win.theta_a, win.r, polished);
        if (v < win.value) {
            win.value = v;
            win.state = polished;
        }
        double g_z, g_x;
        bob_coefficients(spec, win.theta_a, win.state, g_z, g_x);
        const BobVector r2 = best_arc_point(g_z, g_x);
        auto f_theta = [&](double th) { return eval_fobj(spec, th, r2, win.state); };
        const double th2 = golden_min_angle(f_theta, std::max(0.0, win.theta_a - 0.05),
                                            std::min(M_PI, win.theta_a + 0.05), 45);
        v = f_theta(th2);
        if (v < win.value) {
            win.value = v;
            win.theta_a = th2;
            win.r = r2;
        }
    }
    return win;
}

// Zero the smaller block of the state (each block has rank <= 2 already, so
// the rank-2 restriction keeps the dominant block only).
StructuredState restrict_rank2(const StructuredState& s) {
    StructuredState out = s;
    const double t0 = s.L_phi_plus + s.L_psi_minus;
    const double t1 = s.L_phi_minus + s.L_psi_plus;
    if (t0 >= t1) {
        out.L_phi_minus = out.L_psi_plus = out.l2 = 0.0;
    } else {
        out.L_phi_plus = out.L_psi_minus = out.l1 = 0.0;
    }
    const double tr = out.trace();
    if (tr > 1e-300) {
        out.L_phi_plus /= tr;
        out.L_psi_minus /= tr;
        out.L_phi_minus /= tr;
        out.L_psi_plus /= tr;
        out.l1 /= tr;
        out.l2 /= tr;
    }
    return out;
}

namespace {

struct ArcVertex {
    double phi_lo = 0.0, phi_hi = 0.0;  // covered arc segment (outer vertices)
    bool endpoint = false;              // lies on the arc itself, not refinable
    BobVector r;
    CertifiedValue sol;
    bool solved = false;
    double eps = 0.0;                   // requested Frank-Wolfe tolerance
};

ArcVertex make_endpoint(double phi) {
    ArcVertex v;
    v.endpoint = true;
    v.phi_lo = v.phi_hi = phi;
    v.r = {std::cos(phi), std::sin(phi)};
    v.sol.lower_bound = -std::numeric_limits<double>::infinity();
    return v;
}

// Intersection of the tangent lines at the segment ends: t(mid)/cos(width/2).
ArcVertex make_outer(double phi_lo, double phi_hi) {
    ArcVertex v;
    v.phi_lo = phi_lo;
    v.phi_hi = phi_hi;
    const double mid = 0.5 * (phi_lo + phi_hi);
    const double scale = 1.0 / std::cos(0.5 * (phi_hi - phi_lo));
    v.r = {scale * std::cos(mid), scale * std::sin(mid)};
    v.sol.lower_bound = -std::numeric_limits<double>::infinity();
    return v;
}

struct Leaf {
    double center = 0.0, half_width = 0.0;
    std::vector<ArcVertex> verts;
    double penalty = 0.0;
    long id = 0;

    double inner_bound() const {
        double b = std::numeric_limits<double>::infinity();
        for (const auto& v : verts) b = std::min(b, v.sol.lower_bound);
        return b;
    }
    double bound() const { return inner_bound() - penalty; }
    int worst_vertex() const {
        int w = 0;
        for (int i = 1; i < static_cast<int>(verts.size()); ++i)
            if (verts[i].sol.lower_bound < verts[w].sol.lower_bound) w = i;
        return w;
    }
};

}  // namespace

CertifiedValue certify_c_lambda(const ObjectiveSpec& spec, double gap_tol, long budget,
                                const CertifyOptions& opts) {
    spec.validate();
    if (gap_tol <= 0.0) throw std::invalid_argument("certify_c_lambda: gap_tol must be positive");

    HeuristicOptions hopts;
    hopts.threads = opts.threads;
    const HeuristicResult heur =
        heuristic_min(spec, opts.heuristic_restarts, opts.seed, hopts);
    HeuristicResult best_feasible = heur;

    const bool theta_independent =
        spec.w1 == 0.0 && std::abs(spec.lambda.l10) + std::abs(spec.lambda.l11) == 0.0;

    // Initial cover of [0, pi] and initial outer polygon {0, pi/2, pi}.
    std::vector<Leaf> leaves;
    long next_id = 0;
    const int n_intervals = theta_independent ? 1 : opts.initial_theta_intervals;
    for (int i = 0; i < n_intervals; ++i) {
        Leaf lf;
        lf.half_width = theta_independent ? 0.0 : M_PI / (2.0 * n_intervals);
        lf.center = theta_independent ? heur.theta_a : (2 * i + 1) * lf.half_width;
        lf.penalty = continuity_penalty(lf.half_width, spec);
        lf.verts.push_back(make_endpoint(0.0));
        lf.verts.push_back(make_outer(0.0, M_PI / 2.0));
        lf.verts.push_back(make_outer(M_PI / 2.0, M_PI));
        lf.verts.push_back(make_endpoint(M_PI));
        lf.id = next_id++;
        leaves.push_back(lf);
    }

    long solves = 0;
    const double fw_eps_fine = std::max(gap_tol / 5.0, 1e-4);

    // Batch-solve every vertex whose `solved` flag is down, at its requested
    // tolerance; results land in fixed slots so the outcome is independent of
    // scheduling.
    auto solve_pending = [&]() {
        std::vector<std::pair<Leaf*, int>> todo;
        for (auto& lf : leaves)
            for (int vi = 0; vi < static_cast<int>(lf.verts.size()); ++vi)
                if (!lf.verts[vi].solved) todo.emplace_back(&lf, vi);
        parallel_for(todo.size(), opts.threads, [&](size_t k) {
            auto [lf, vi] = todo[k];
            ArcVertex& v = lf->verts[vi];
            FrankWolfeOptions fw;
            fw.eps_tol = v.eps > 0.0 ? v.eps : opts.fw_eps_coarse;
            fw.max_iters = opts.fw_max_iters;
            fw.initial_state = v.sol.iterations > 0 ? v.sol.argmin_state : heur.state;
            v.sol = frank_wolfe(spec, lf->center, v.r, fw);
            v.solved = true;
        });
        solves += static_cast<long>(todo.size());
    };

    solve_pending();

    // Endpoint vertices sit on the arc, so their solutions are feasible points
    // and can undercut the heuristic.
    auto refresh_feasible = [&]() {
        for (const auto& lf : leaves)
            for (const auto& v : lf.verts)
                if (v.endpoint && v.solved && v.sol.feasible_value < best_feasible.value) {
                    best_feasible.value = v.sol.feasible_value;
                    best_feasible.theta_a = lf.center;
                    best_feasible.r = v.r;
                    best_feasible.state = v.sol.argmin_state;
                }
    };
    refresh_feasible();

    // Fixed refinement width: keeps results identical for any worker count
    // while still feeding the solve batches enough parallel work.
    constexpr int kRefineBatch = 4;
    while (solves < budget) {
        // Leaves in ascending bound order; the first one carries the bound.
        std::vector<size_t> order(leaves.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            const double ba = leaves[a].bound(), bb = leaves[b].bound();
            if (ba != bb) return ba < bb;
            return leaves[a].id < leaves[b].id;
        });
        const double certified = leaves[order[0]].bound();
        if (best_feasible.value - certified <= gap_tol) break;

        // Refine the worst few leaves together, then solve in one batch.
        const size_t n_refine = std::min<size_t>(kRefineBatch, order.size());
        for (size_t oi = 0; oi < n_refine; ++oi) {
            const size_t li = order[oi];
            if (leaves[li].bound() > best_feasible.value - gap_tol) continue;  // tight enough
            Leaf& lf = leaves[li];
            const int wv = lf.worst_vertex();
            const ArcVertex v = lf.verts[wv];

            // Slack attribution: loose Frank-Wolfe solve, theta interval
            // width, or Bob polygon overshoot, whichever dominates.
            const double slack_fw = v.sol.gap > fw_eps_fine ? v.sol.gap : 0.0;
            const double slack_theta = lf.penalty;
            double slack_bob = 0.0;
            if (!v.endpoint) {
                double g_z, g_x;
                bob_coefficients(spec, lf.center, v.sol.argmin_state, g_z, g_x);
                const BobVector arc = best_arc_point(g_z, g_x);
                slack_bob = std::max(
                    0.0, (v.r.r_z * g_z + v.r.r_x * g_x) - (arc.r_z * g_z + arc.r_x * g_x));
            }

            if (slack_fw >= slack_theta && slack_fw >= slack_bob) {
                lf.verts[wv].solved = false;
                lf.verts[wv].eps = fw_eps_fine;
            } else if (slack_theta >= slack_bob && !theta_independent && lf.half_width > 1e-7) {
                Leaf left = lf, right = lf;
                left.half_width = right.half_width = 0.5 * lf.half_width;
                left.center = lf.center - left.half_width;
                right.center = lf.center + right.half_width;
                left.penalty = right.penalty = continuity_penalty(left.half_width, spec);
                left.id = next_id++;
                right.id = next_id++;
                for (auto* child : {&left, &right})
                    for (auto& cv : child->verts) {
                        cv.solved = false;
                        cv.eps = fw_eps_fine;
                    }
                leaves[li] = left;
                leaves.push_back(right);
            } else if (!v.endpoint) {
                const double mid = 0.5 * (v.phi_lo + v.phi_hi);
                ArcVertex a = make_outer(v.phi_lo, mid);
                ArcVertex b = make_outer(mid, v.phi_hi);
                for (ArcVertex* nv : {&a, &b}) {
                    nv->sol.argmin_state = v.sol.argmin_state;
                    nv->sol.iterations = v.sol.iterations;
                    nv->eps = fw_eps_fine;
                }
                lf.verts[wv] = a;
                lf.verts.insert(lf.verts.begin() + wv + 1, b);
            } else {
                // Endpoint vertex with no reducible slack left: tighten it.
                lf.verts[wv].solved = false;
                lf.verts[wv].eps = std::max(fw_eps_fine / 4.0, 1e-6);
            }
        }
        solve_pending();
        refresh_feasible();
    }

    double certified = std::numeric_limits<double>::infinity();
    for (const auto& lf : leaves) certified = std::min(certified, lf.bound());

    CertifiedValue out;
    out.lower_bound = certified;
    out.feasible_value = best_feasible.value;
    out.gap = best_feasible.value - certified;
    out.converged = out.gap <= gap_tol;
    out.iterations = solves;
    out.argmin_theta_a = best_feasible.theta_a;
    out.argmin_r = best_feasible.r;
    out.argmin_state = best_feasible.state;
    return out;
}

}  // namespace diqkd::certify
