#pragma once

#include <arraydoctor/recovery.hpp>

namespace arraydoctor {

/// Expanded overlapping-block synthesis followed by a dense sensing matrix.
///
/// z stacks N - h + 1 windows of length h; window i covers q entries
/// i .. i + h - 1 and overlapping contributions add: q = sum_i E_i z_i.
class ExpandedBlockOperator {
public:
    ExpandedBlockOperator(const CMatrix& X, Index h) : x_(&X), h_(h), windows_(X.cols() - h + 1) {
        if (h < 1 || h > X.cols()) throw InvalidArgument("block length h must be in [1, N]");
    }

    Index rows() const { return x_->rows(); }
    Index cols() const { return windows_ * h_; }
    Index windows() const { return windows_; }
    Index block_length() const { return h_; }

    CVector synthesize(const CVector& z) const {
        CVector q = CVector::Zero(x_->cols());
        for (Index i = 0; i < windows_; ++i) q.segment(i, h_) += z.segment(i * h_, h_);
        return q;
    }

    /// E^T g: window i receives g[i .. i + h - 1].
    CVector analyze(const CVector& g) const {
        CVector z(cols());
        for (Index i = 0; i < windows_; ++i) z.segment(i * h_, h_) = g.segment(i, h_);
        return z;
    }

    CVector apply(const CVector& z) const { return (*x_) * synthesize(z); }
    CVector adjoint(const CVector& r) const { return analyze(x_->adjoint() * r); }

private:
    const CMatrix* x_;
    Index h_;
    Index windows_;
};

struct BlockConfig {
    Index h = 8;
    double lambda_g = 1.0;
    int max_iters = 2000;
    double rel_tol = 1e-8;

    void validate() const {
        if (h < 1) throw InvalidArgument("block length h must be >= 1");
        if (!(lambda_g > 0.0) || !std::isfinite(lambda_g)) throw InvalidArgument("lambda_g must be > 0");
        ApgOptions o;
        o.max_iters = max_iters;
        o.rel_tol = rel_tol;
        o.validate();
    }

    /// h = 8 and lambda_g = Omega sigma sqrt(h).
    static BlockConfig defaults(Index n, double rho, Index h = 8, double sigma_floor = 1e-3) {
        BlockConfig c;
        c.h = std::min(h, n);
        c.lambda_g = default_omega(n) * effective_sigma(rho, sigma_floor) * std::sqrt(static_cast<double>(c.h));
        return c;
    }
};

/// z_i <- z_i max(0, 1 - t / ||z_i||) per window.
inline CVector group_soft_threshold(const CVector& z, Index h, double t) {
    CVector out(z.size());
    for (Index i = 0; i < z.size(); i += h) {
        const double norm = z.segment(i, h).norm();
        if (norm <= t)
            out.segment(i, h).setZero();
        else
            out.segment(i, h) = z.segment(i, h) * (1.0 - t / norm);
    }
    return out;
}

inline ApgResult block_sparse_solve(const CVector& y, const CMatrix& X, const BlockConfig& cfg,
                                    bool record_objective = false) {
    cfg.validate();
    if (!X.allFinite()) throw InvalidArgument("block recovery: sensing matrix contains non-finite values");
    const ExpandedBlockOperator op(X, cfg.h);
    const Index h = cfg.h;
    const double lam = cfg.lambda_g;
    ApgOptions o;
    o.max_iters = cfg.max_iters;
    o.rel_tol = cfg.rel_tol;
    o.record_objective = record_objective;
    return apg_solve(
        op, y, [h, lam](const CVector& v, double t) { return group_soft_threshold(v, h, t * lam); },
        [h, lam](const CVector& z) {
            double s = 0.0;
            for (Index i = 0; i < z.size(); i += h) s += z.segment(i, h).norm();
            return lam * s;
        },
        o);
}

/// min 1/2 ||y - X sum_i E_i z_i||^2 + lambda_g sum_i ||z_i||_2, returned as
/// the assembled q. No block partition is assumed.
inline CVector block_sparse_recover(const CVector& y, const CMatrix& X, const BlockConfig& cfg) {
    const ApgResult sol = block_sparse_solve(y, X, cfg);
    return ExpandedBlockOperator(X, cfg.h).synthesize(sol.x);
}

/// Block recovery, support detection and LS debias. When the detected support
/// cannot be debiased (more entries than measurements, or rank deficient) the
/// regularized estimate restricted to the support is kept.
inline DiagnosisReport diagnose_block(const MeasurementSet& ms, const SteeringVector& a, const BlockConfig& cfg,
                                      double tau_rel, const std::optional<CVector>& truth = std::nullopt,
                                      Convention conv = Convention::ReceivedMinusIdeal) {
    require_same_size(ms.X.cols(), a.size(), "diagnose_block: sensing columns vs steering");
    const ApgResult sol = block_sparse_solve(ms.y, ms.X, cfg);
    const CVector q_reg = ExpandedBlockOperator(ms.X, cfg.h).synthesize(sol.x);
    IndexSet support = detect_support(q_reg, tau_rel);

    DiagnosisReport r;
    r.iters = sol.iters;
    r.q_hat = CVector::Zero(ms.X.cols());
    try {
        const CVector qs = ls_debias(ms.y, ms.X, support);
        for (std::size_t j = 0; j < support.size(); ++j) r.q_hat[support[j]] = qs[static_cast<Index>(j)];
    } catch (const UnderdeterminedError&) {
        for (Index n : support) r.q_hat[n] = q_reg[n];
    } catch (const SingularSystemError&) {
        for (Index n : support) r.q_hat[n] = q_reg[n];
    }
    const BlockageEstimate e = extract_blockage(r.q_hat, a, support, conv);
    r.support = std::move(support);
    r.kappa_hat = e.kappa;
    r.phi_hat = e.phi;
    if (truth && truth->squaredNorm() > 0.0) r.nmse_db = nmse_db(*truth, r.q_hat);
    return r;
}

}  // namespace arraydoctor
