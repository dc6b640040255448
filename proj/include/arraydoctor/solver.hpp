#pragma once

#include <arraydoctor/core.hpp>

#include <optional>

namespace arraydoctor {

// A linear operator for the solvers provides rows(), cols(), apply(x) = A x and
// adjoint(r) = A^* r. Dense matrices, the expanded-block synthesis and the
// Kronecker measurement map all plug into the same accelerated proximal
// gradient engine.

class DenseOperator {
public:
    explicit DenseOperator(const CMatrix& m) : m_(&m) {}

    Index rows() const { return m_->rows(); }
    Index cols() const { return m_->cols(); }
    CVector apply(const CVector& x) const { return (*m_) * x; }
    CVector adjoint(const CVector& r) const { return m_->adjoint() * r; }

private:
    const CMatrix* m_;
};

struct ApgOptions {
    int max_iters = 2000;
    double rel_tol = 1e-8;
    std::optional<double> step;  // default 1 / ||A||_2^2
    bool record_objective = false;

    void validate() const {
        if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
        if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be > 0");
        if (step && !(*step > 0.0)) throw InvalidArgument("solver step must be > 0");
    }
};

struct ApgResult {
    CVector x;
    int iters = 0;
    bool converged = false;
    std::vector<double> objective;  // per accepted iterate when recorded, starting at x = 0
};

/// Largest eigenvalue of A^* A by power iteration from a fixed start vector.
template <class Op>
double operator_norm_squared(const Op& op, int max_iters = 200, double tol = 1e-9) {
    const Index n = op.cols();
    if (n == 0 || op.rows() == 0) return 0.0;
    CVector v(n);
    // fixed, generic start so results never depend on a random stream
    for (Index i = 0; i < n; ++i)
        v[i] = cplx{1.0 + 0.37 * std::cos(1.3 * static_cast<double>(i)), 0.51 * std::sin(0.7 * static_cast<double>(i))};
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        CVector w = op.adjoint(op.apply(v));
        const double next = w.norm();
        if (next == 0.0) return 0.0;
        v = w / next;
        if (std::abs(next - lambda) <= tol * next) return next;
        lambda = next;
    }
    return lambda;
}

/// Minimizes 1/2 ||y - A x||^2 + penalty(x) by accelerated proximal gradient.
///
/// prox(v, t) must return argmin_u 1/2 ||u - v||^2 + t * penalty(u).
/// Monotone variant: when the momentum step raises the objective, the
/// iteration falls back to a plain proximal step from the last accepted
/// iterate and the momentum restarts. Stops once the relative objective
/// decrease drops below rel_tol.
template <class Op, class Prox, class Penalty>
ApgResult apg_solve(const Op& op, const CVector& y, Prox&& prox, Penalty&& penalty, const ApgOptions& opt) {
    opt.validate();
    require_same_size(y.size(), op.rows(), "solver: observations vs operator rows");
    if (!y.allFinite()) throw InvalidArgument("solver: observations contain non-finite values");

    double step = 0.0;
    if (opt.step) {
        step = *opt.step;
    } else {
        const double l = operator_norm_squared(op);
        if (!(l > 0.0)) {
            ApgResult zero;
            zero.x = CVector::Zero(op.cols());
            zero.converged = true;
            return zero;
        }
        // slight inflation absorbs the power-iteration underestimate
        step = 1.0 / (1.02 * l);
    }

    // Ax and Az are carried along so each iteration costs one apply and one adjoint.
    auto objective = [&](const CVector& ax, const CVector& x) { return 0.5 * (ax - y).squaredNorm() + penalty(x); };

    ApgResult res;
    CVector x = CVector::Zero(op.cols());
    CVector ax = CVector::Zero(op.rows());
    CVector z = x;
    CVector az = ax;
    double t = 1.0;
    double f = objective(ax, x);
    if (opt.record_objective) res.objective.push_back(f);

    for (int it = 1; it <= opt.max_iters; ++it) {
        res.iters = it;
        CVector x_next = prox(z - step * op.adjoint(az - y), step);
        CVector ax_next = op.apply(x_next);
        double f_next = objective(ax_next, x_next);
        if (f_next > f) {
            x_next = prox(x - step * op.adjoint(ax - y), step);
            ax_next = op.apply(x_next);
            f_next = objective(ax_next, x_next);
            t = 1.0;
            z = x_next;
            az = ax_next;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            const double beta = (t - 1.0) / t_next;
            z = x_next + beta * (x_next - x);
            az = ax_next + beta * (ax_next - ax);
            t = t_next;
        }
        if (!std::isfinite(f_next)) throw InvalidArgument("solver diverged; check the step size");
        const double decrease = f - f_next;
        x = std::move(x_next);
        ax = std::move(ax_next);
        // a plain step that cannot decrease means x is already a fixed point
        const bool stalled = !(f_next < f) && t == 1.0;
        f = std::min(f, f_next);
        if (opt.record_objective) res.objective.push_back(f);
        if (stalled || decrease <= opt.rel_tol * std::max(f, std::numeric_limits<double>::min())) {
            res.converged = true;
            break;
        }
    }
    res.x = std::move(x);
    return res;
}

}  // namespace arraydoctor
