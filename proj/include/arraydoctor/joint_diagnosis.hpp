#pragma once

#include <arraydoctor/recovery.hpp>

namespace arraydoctor {

/// U = F^T (x) W^*, shape (k_t k_r) x (N_T N_R), so U vec(A_s) = vec(W^* A_s F).
/// Entry (i k_r + j, p N_R + q) = F(p, i) conj(W(q, j)).
inline CMatrix build_sensing(const CMatrix& F, const CMatrix& W) {
    const Index nt = F.rows(), kt = F.cols(), nr = W.rows(), kr = W.cols();
    CMatrix U(kt * kr, nt * nr);
    for (Index i = 0; i < kt; ++i)
        for (Index p = 0; p < nt; ++p) U.block(i * kr, p * nr, kr, nr) = F(p, i) * W.adjoint();
    return U;
}

/// Columns S of U without forming U.
inline CMatrix sensing_columns(const CMatrix& F, const CMatrix& W, const IndexSet& s) {
    const Index kt = F.cols(), kr = W.cols(), nr = W.rows();
    CMatrix out(kt * kr, static_cast<Index>(s.size()));
    for (std::size_t c = 0; c < s.size(); ++c) {
        const Index p = s[c] / nr, q = s[c] % nr;
        for (Index i = 0; i < kt; ++i)
            for (Index j = 0; j < kr; ++j) out(i * kr + j, static_cast<Index>(c)) = F(p, i) * std::conj(W(q, j));
    }
    return out;
}

/// The Kronecker measurement map applied matrix-free:
/// g -> vec(W^* G F) and r -> vec(W R F^*), with G = unvec(g) of size N_R x N_T.
class KroneckerOperator {
public:
    KroneckerOperator(const CMatrix& W, const CMatrix& F) : w_(&W), f_(&F) {}

    Index rows() const { return w_->cols() * f_->cols(); }
    Index cols() const { return w_->rows() * f_->rows(); }

    CVector apply(const CVector& g) const {
        const CMatrix G = g.reshaped(w_->rows(), f_->rows());
        return (w_->adjoint() * G * (*f_)).reshaped();
    }
    CVector adjoint(const CVector& r) const {
        const CMatrix R = r.reshaped(w_->cols(), f_->cols());
        return ((*w_) * R * f_->adjoint()).reshaped();
    }

private:
    const CMatrix* w_;
    const CMatrix* f_;
};

/// Products N_T N_R above this never materialize U.
inline constexpr Index dense_sensing_limit = Index{1} << 16;

struct JointConfig {
    LassoConfig lasso;
    double tau_rel = 0.1;
    /// A row (column) of A_s_hat is faulty when more than this fraction of its
    /// entries lies in the detected support.
    double faulty_fraction = 0.25;
    /// Structured estimator only: significance level for dropping flagged rows and
    /// columns, in standard errors. 0 disables.
    double prune_z = 3.0;

    void validate() const {
        lasso.validate();
        if (!(tau_rel > 0.0 && tau_rel < 1.0)) throw InvalidArgument("tau_rel must be in (0, 1)");
        if (!(faulty_fraction >= 0.0 && faulty_fraction < 1.0))
            throw InvalidArgument("faulty_fraction must be in [0, 1)");
        if (!(prune_z >= 0.0) || !std::isfinite(prune_z)) throw InvalidArgument("prune_z must be >= 0");
    }

    static JointConfig defaults(Index nr, Index nt, double rho, double sigma_floor = 1e-3) {
        JointConfig c;
        c.lasso = LassoConfig::defaults(nr * nt, rho, sigma_floor);
        return c;
    }
};

struct JointReport {
    CMatrix A_s_hat;  // N_R x N_T
    IndexSet support;  // in vec(A_s) order
    IndexSet I_r, I_t;  // fault-free rows and columns
    IndexSet faulty_r, faulty_t;
    CVector q_t_hat;  // estimate of (b_T o a_T) - a_T
    CVector q_r_hat;  // estimate of (b o a) - a
    BlockageEstimate rx, tx;  // on faulty_r and faulty_t
    int iters = 0;
};

/// Column-wise and row-wise averaging of the fault-free parts of A_s_hat:
/// q_t = conj(a_r^* A_r) / ||a_r||^2 over fault-free rows, q_r = A_t a_t / ||a_t||^2
/// over fault-free columns.
inline void average_sides(JointReport& r, const SteeringVector& a, const SteeringVector& a_t) {
    const Index nr = r.A_s_hat.rows(), nt = r.A_s_hat.cols();
    r.q_t_hat = CVector::Zero(nt);
    double norm_r = 0.0;
    for (Index q : r.I_r) {
        r.q_t_hat += (std::conj(a[q]) * r.A_s_hat.row(q)).transpose();
        norm_r += std::norm(a[q]);
    }
    r.q_t_hat = r.q_t_hat.conjugate() / norm_r;

    r.q_r_hat = CVector::Zero(nr);
    double norm_t = 0.0;
    for (Index p : r.I_t) {
        r.q_r_hat += r.A_s_hat.col(p) * a_t[p];
        norm_t += std::norm(a_t[p]);
    }
    r.q_r_hat /= norm_t;
}

/// How the per-side innovations are formed once the faulty rows and columns are known.
/// Averaging: unstructured LS debias of vec(A_s) on the detected support, then the
/// row and column averages. Structured: LS directly on the measurements with A_s
/// parametrized by its rank structure (see structured_estimate).
enum class JointEstimator { Averaging, Structured };

namespace detail {

inline void classify_rows_cols(JointReport& r, Index nr, Index nt, double fraction) {
    std::vector<Index> row_hits(static_cast<std::size_t>(nr), 0), col_hits(static_cast<std::size_t>(nt), 0);
    for (Index idx : r.support) {
        ++row_hits[static_cast<std::size_t>(idx % nr)];
        ++col_hits[static_cast<std::size_t>(idx / nr)];
    }
    for (Index q = 0; q < nr; ++q) {
        const bool faulty = static_cast<double>(row_hits[static_cast<std::size_t>(q)]) > fraction * static_cast<double>(nt);
        (faulty ? r.faulty_r : r.I_r).push_back(q);
    }
    for (Index p = 0; p < nt; ++p) {
        const bool faulty = static_cast<double>(col_hits[static_cast<std::size_t>(p)]) > fraction * static_cast<double>(nr);
        (faulty ? r.faulty_t : r.I_t).push_back(p);
    }
}

}  // namespace detail

namespace detail {

/// Columns of the structured model for faulty rows R and columns C:
/// [q_r[R] | conj(q_t[C]) | vec entries of R x C].
inline CMatrix structured_columns(const JointMeasurementSet& jms, const SteeringVector& a, const SteeringVector& a_t,
                                  const JointReport& r) {
    const CMatrix& W = jms.W;
    const CMatrix& F = jms.F;
    const Index nr = W.rows(), kr = W.cols(), kt = F.cols();
    const Index nR = static_cast<Index>(r.faulty_r.size()), nC = static_cast<Index>(r.faulty_t.size());

    CVector f_healthy = CVector::Zero(kt);  // sum over healthy p of conj(a_T[p]) F(p, :)
    for (Index p : r.I_t) f_healthy += std::conj(a_t[p]) * F.row(p).transpose();
    CVector w_healthy = CVector::Zero(kr);  // sum over healthy q of a_q conj(W(q, :))
    for (Index q : r.I_r) w_healthy += a[q] * W.row(q).adjoint();

    CMatrix M(kt * kr, nR + nC + nR * nC);
    for (Index c = 0; c < nR; ++c) {
        const Index q = r.faulty_r[static_cast<std::size_t>(c)];
        for (Index i = 0; i < kt; ++i)
            for (Index j = 0; j < kr; ++j) M(i * kr + j, c) = f_healthy[i] * std::conj(W(q, j));
    }
    for (Index c = 0; c < nC; ++c) {
        const Index p = r.faulty_t[static_cast<std::size_t>(c)];
        for (Index i = 0; i < kt; ++i)
            for (Index j = 0; j < kr; ++j) M(i * kr + j, nR + c) = F(p, i) * w_healthy[j];
    }
    IndexSet cross;
    for (Index p : r.faulty_t)
        for (Index q : r.faulty_r) cross.push_back(p * nr + q);
    if (!cross.empty()) M.rightCols(nR * nC) = sensing_columns(F, W, cross);
    return M;
}

inline void move_to_healthy(IndexSet& faulty, IndexSet& healthy, const std::vector<bool>& drop) {
    IndexSet keep;
    for (std::size_t c = 0; c < faulty.size(); ++c) (drop[c] ? healthy : keep).push_back(faulty[c]);
    faulty = std::move(keep);
    std::sort(healthy.begin(), healthy.end());
}

}  // namespace detail

/// LS fit of the measurements to A_s = q_r a_T^* + a q_t^* + q_r q_t^* given the faulty
/// receive rows R and transmit columns C. Off R x C the entries are linear in q_r[R] and
/// conj(q_t[C]); each entry of R x C is a free unknown. Fills q_r_hat, q_t_hat (zero off
/// R and C) and A_s_hat. Minimum-norm when the reduced system is still rank deficient.
///
/// With prune_z > 0 and a full-rank fit, flagged rows and columns whose estimate lies
/// within prune_z standard errors of zero are reclassified healthy and the fit repeated once.
inline void structured_estimate(JointReport& r, const JointMeasurementSet& jms, const SteeringVector& a,
                                const SteeringVector& a_t, double sigma = 0.0, double prune_z = 0.0) {
    const Index nr = jms.W.rows(), nt = jms.F.rows();
    const CVector y = jms.Y.reshaped();
    CMatrix M = detail::structured_columns(jms, a, a_t, r);
    CVector x = ls_solve_min_norm(M, y);

    if (prune_z > 0.0 && sigma > 0.0 && M.cols() > 0 && M.cols() <= M.rows()) {
        const Eigen::LDLT<CMatrix> gram(M.adjoint() * M);
        Eigen::ColPivHouseholderQR<CMatrix> qr(M);
        qr.setThreshold(1e-10);
        if (qr.rank() == M.cols() && gram.info() == Eigen::Success) {
            const CMatrix cov = gram.solve(CMatrix::Identity(M.cols(), M.cols()));
            const auto nR = r.faulty_r.size(), nC = r.faulty_t.size();
            std::vector<bool> drop_r(nR), drop_t(nC);
            bool any = false;
            for (std::size_t c = 0; c < nR + nC; ++c) {
                const Index ci = static_cast<Index>(c);
                const bool drop = std::abs(x[ci]) < prune_z * sigma * std::sqrt(std::max(0.0, cov(ci, ci).real()));
                (c < nR ? drop_r[c] : drop_t[c - nR]) = drop;
                any = any || drop;
            }
            if (any) {
                detail::move_to_healthy(r.faulty_r, r.I_r, drop_r);
                detail::move_to_healthy(r.faulty_t, r.I_t, drop_t);
                M = detail::structured_columns(jms, a, a_t, r);
                x = ls_solve_min_norm(M, y);
            }
        }
    }

    const Index nR = static_cast<Index>(r.faulty_r.size()), nC = static_cast<Index>(r.faulty_t.size());
    r.q_r_hat = CVector::Zero(nr);
    r.q_t_hat = CVector::Zero(nt);
    for (Index c = 0; c < nR; ++c) r.q_r_hat[r.faulty_r[static_cast<std::size_t>(c)]] = x[c];
    for (Index c = 0; c < nC; ++c) r.q_t_hat[r.faulty_t[static_cast<std::size_t>(c)]] = std::conj(x[nR + c]);

    r.A_s_hat = r.q_r_hat * a_t.adjoint() + a * r.q_t_hat.adjoint() + r.q_r_hat * r.q_t_hat.adjoint();
    Index c = nR + nC;
    for (Index p : r.faulty_t)
        for (Index q : r.faulty_r) r.A_s_hat(q, p) = x[c++];
}

/// LASSO on the Kronecker map, support detection, row/column classification and the
/// per-side estimates. Innovations are received minus ideal.
inline JointReport diagnose_joint(const JointMeasurementSet& jms, const SteeringVector& a,
                                  const SteeringVector& a_t, const JointConfig& cfg,
                                  JointEstimator estimator = JointEstimator::Structured) {
    cfg.validate();
    const Index nr = jms.W.rows(), nt = jms.F.rows();
    require_same_size(a.size(), nr, "diagnose_joint: receive steering vs W rows");
    require_same_size(a_t.size(), nt, "diagnose_joint: transmit steering vs F rows");
    if (jms.Y.rows() != jms.W.cols() || jms.Y.cols() != jms.F.cols())
        throw DimensionError("diagnose_joint: Y must be k_r x k_t");
    if (!jms.W.allFinite() || !jms.F.allFinite()) throw InvalidArgument("diagnose_joint: non-finite weights");

    const CVector y = jms.Y.reshaped();
    const KroneckerOperator op(jms.W, jms.F);
    const ApgResult sol = lasso_solve(op, y, cfg.lasso);

    JointReport r;
    r.iters = sol.iters;
    r.support = detect_support(sol.x, cfg.tau_rel);

    if (estimator == JointEstimator::Averaging) {
        // Column subsets of a Kronecker product are often structurally rank
        // deficient, so the debias takes the minimum-norm solution.
        const CVector gs = ls_solve_min_norm(sensing_columns(jms.F, jms.W, r.support), y);
        CVector g = CVector::Zero(nr * nt);
        for (std::size_t j = 0; j < r.support.size(); ++j) g[r.support[j]] = gs[static_cast<Index>(j)];
        r.A_s_hat = g.reshaped(nr, nt);
    }
    detail::classify_rows_cols(r, nr, nt, cfg.faulty_fraction);
    if (r.I_r.empty() || r.I_t.empty())
        throw DegenerateSupportError("joint diagnosis: every receive row or every transmit column was flagged faulty");

    if (estimator == JointEstimator::Averaging)
        average_sides(r, a, a_t);
    else
        structured_estimate(r, jms, a, a_t, cfg.lasso.sigma, cfg.prune_z);
    r.rx = extract_blockage(r.q_r_hat, a, r.faulty_r);
    r.tx = extract_blockage(r.q_t_hat, a_t, r.faulty_t);
    return r;
}

}  // namespace arraydoctor
