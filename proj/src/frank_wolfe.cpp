#include "diqkd/frank_wolfe.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace diqkd::certify {

namespace {

// Rank-1 state of one block from the eigenvector of a 2x2 symmetric matrix.
void block_argmin(double a, double b, double d, double& lo, double& vx, double& vy) {
    const double tr = a + d;
    const double disc = std::sqrt((a - d) * (a - d) + 4.0 * b * b);
    lo = 0.5 * (tr - disc);
    // Two algebraically equivalent eigenvector forms; keep the better
    // conditioned one and fall back to an axis for (near-)diagonal blocks.
    vx = b;
    vy = lo - a;
    double n = std::hypot(vx, vy);
    const double wx = lo - d, wy = b;
    const double n2 = std::hypot(wx, wy);
    if (n2 > n) {
        vx = wx;
        vy = wy;
        n = n2;
    }
    const double scale = std::abs(a) + 2.0 * std::abs(b) + std::abs(d) + 1e-300;
    if (n <= 1e-12 * scale) {
        if (a <= d) {
            vx = 1.0;
            vy = 0.0;
        } else {
            vx = 0.0;
            vy = 1.0;
        }
        n = 1.0;
    }
    vx /= n;
    vy /= n;
}

}  // namespace

LinearMinResult linear_min_structured(const Matrix& cost) {
    if (cost.dim() != 4) throw std::invalid_argument("linear_min_structured: cost must be 4x4");
    if (cost.hermiticity_defect() > 1e-10)
        throw std::invalid_argument("linear_min_structured: cost must be Hermitian");
    const BlockPair bp = structured_blocks(cost);
    double lo0, x0, y0, lo1, x1, y1;
    block_argmin(bp.a0, bp.b0, bp.d0, lo0, x0, y0);
    block_argmin(bp.a1, bp.b1, bp.d1, lo1, x1, y1);
    LinearMinResult out;
    if (lo0 <= lo1) {
        out.value = lo0;
        out.state = {x0 * x0, y0 * y0, 0.0, 0.0, x0 * y0, 0.0};
    } else {
        out.value = lo1;
        out.state = {0.0, 0.0, x1 * x1, y1 * y1, 0.0, x1 * y1};
    }
    return out;
}

namespace {

StructuredState perturb_full_rank(const StructuredState& s) {
    const double neg = -s.min_eigenvalue();
    const double delta = std::max(neg, 1e-14);
    return StructuredState::mix(s, StructuredState::maximally_mixed(), delta);
}

double golden_section_min(const std::function<double(double)>& f, double a, double b,
                          double width) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > width) {
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

}  // namespace

CertifiedValue frank_wolfe(const ObjectiveSpec& spec, double theta_a, const BobVector& r,
                           const FrankWolfeOptions& opts) {
    spec.validate();
    if (opts.eps_tol <= 0.0) throw std::invalid_argument("frank_wolfe: eps_tol must be positive");

    StructuredState rho =
        opts.initial_state ? opts.initial_state->clipped_to_psd() : StructuredState::maximally_mixed();

    CertifiedValue out;
    out.argmin_theta_a = theta_a;
    out.argmin_r = r;
    out.argmin_state = rho;
    out.feasible_value = eval_fobj(spec, theta_a, r, rho);
    out.lower_bound = -std::numeric_limits<double>::infinity();

    for (int k = 0; k < opts.max_iters; ++k) {
        ++out.iterations;
        const StructuredState rho_t = perturb_full_rank(rho);
        const double f_t = eval_fobj(spec, theta_a, r, rho_t);
        if (f_t < out.feasible_value) {
            out.feasible_value = f_t;
            out.argmin_state = rho_t;
        }

        const Matrix cost = grad_state(spec, theta_a, r, rho_t);
        const LinearMinResult lin = linear_min_structured(cost);
        const double pairing_here = linalg::real_trace_product(cost, rho_t.to_density());
        const double eps_gap = pairing_here - lin.value;  // exact linearized decrease
        out.lower_bound = std::max(out.lower_bound, f_t - eps_gap);

        if (out.feasible_value - out.lower_bound <= opts.eps_tol) {
            out.converged = true;
            break;
        }
        if (eps_gap <= 1e-14) break;  // stationary

        // Exact-direction step with derivative-free line search.
        const StructuredState target = lin.state;
        auto line = [&](double mu) {
            return eval_fobj(spec, theta_a, r, StructuredState::mix(rho_t, target, mu));
        };
        const double mu = golden_section_min(line, 0.0, 1.0, opts.line_search_width);
        StructuredState next = StructuredState::mix(rho_t, target, mu);
        const double f_next = eval_fobj(spec, theta_a, r, next);
        if (f_next < out.feasible_value) {
            out.feasible_value = f_next;
            out.argmin_state = next;
        }
        rho = next;
    }
    out.gap = out.feasible_value - out.lower_bound;
    out.converged = out.gap <= opts.eps_tol;
    return out;
}

}  // namespace diqkd::certify
