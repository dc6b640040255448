#pragma once

#include <arraydoctor/metrics.hpp>
#include <arraydoctor/sensing.hpp>
#include <arraydoctor/solver.hpp>

namespace arraydoctor {

/// Omega = 2 sqrt(2 ln N), the universal-threshold heuristic.
inline double default_omega(Index n) {
    if (n < 2) return 1.0;
    return 2.0 * std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

/// Noise standard deviation known to the receiver, 1/sqrt(rho). Noiseless
/// sessions (rho = inf) fall back to `floor` so the l1 term still selects a
/// sparse solution.
inline double effective_sigma(double rho, double floor = 1e-3) {
    const double s = std::sqrt(noise_variance(rho));
    return std::max(s, floor);
}

struct LassoConfig {
    double omega = 1.0;
    double sigma = 1.0;
    int max_iters = 2000;
    double rel_tol = 1e-8;
    std::optional<double> step;

    double lambda() const { return omega * sigma; }

    void validate() const {
        if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidArgument("lasso: omega must be > 0");
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidArgument("lasso: sigma must be >= 0");
        options().validate();
    }

    ApgOptions options(bool record = false) const {
        ApgOptions o;
        o.max_iters = max_iters;
        o.rel_tol = rel_tol;
        o.step = step;
        o.record_objective = record;
        return o;
    }

    static LassoConfig defaults(Index n, double rho, double sigma_floor = 1e-3) {
        LassoConfig c;
        c.omega = default_omega(n);
        c.sigma = effective_sigma(rho, sigma_floor);
        return c;
    }
};

/// argmin_u 1/2 |u - v|^2 + t |u| = v max(0, 1 - t/|v|), entrywise.
inline cplx complex_soft_threshold(cplx v, double t) {
    const double m = std::abs(v);
    if (m <= t) return {0.0, 0.0};
    return v * (1.0 - t / m);
}

inline CVector complex_soft_threshold(const CVector& v, double t) {
    CVector out(v.size());
    for (Index i = 0; i < v.size(); ++i) out[i] = complex_soft_threshold(v[i], t);
    return out;
}

template <class Op>
ApgResult lasso_solve(const Op& op, const CVector& y, const LassoConfig& cfg, bool record_objective = false) {
    cfg.validate();
    const double lam = cfg.lambda();
    return apg_solve(
        op, y, [lam](const CVector& v, double t) { return complex_soft_threshold(v, t * lam); },
        [lam](const CVector& x) { return lam * x.cwiseAbs().sum(); }, cfg.options(record_objective));
}

/// Complex LASSO: argmin 1/2 ||y - X nu||^2 + Omega sigma ||nu||_1.
inline CVector lasso(const CVector& y, const CMatrix& X, const LassoConfig& cfg) {
    if (!X.allFinite()) throw InvalidArgument("lasso: sensing matrix contains non-finite values");
    return lasso_solve(DenseOperator(X), y, cfg).x;
}

/// {n : |nu_n| >= tau_rel max |nu|}; empty when nu = 0.
inline IndexSet detect_support(const CVector& nu, double tau_rel) {
    if (!(tau_rel > 0.0 && tau_rel < 1.0)) throw InvalidArgument("tau_rel must be in (0, 1)");
    IndexSet s;
    if (nu.size() == 0) return s;
    const double peak = nu.cwiseAbs().maxCoeff();
    if (!(peak > 0.0)) return s;
    for (Index i = 0; i < nu.size(); ++i)
        if (std::abs(nu[i]) >= tau_rel * peak) s.push_back(i);
    return s;
}

inline CMatrix select_columns(const CMatrix& X, const IndexSet& s) {
    CMatrix out(X.rows(), static_cast<Index>(s.size()));
    for (std::size_t j = 0; j < s.size(); ++j) out.col(static_cast<Index>(j)) = X.col(s[j]);
    return out;
}

/// Least squares on a column subset, solved by column-pivoted QR.
///
/// Columns whose pivot falls below 1e-10 of the largest make the system
/// singular.
inline CVector ls_solve(const CMatrix& Xs, const CVector& y) {
    require_same_size(Xs.rows(), y.size(), "least squares: rows vs observations");
    const Index k = Xs.cols();
    if (k == 0) return CVector(0);
    if (k > Xs.rows())
        throw UnderdeterminedError("least squares on " + std::to_string(k) + " unknowns needs at least as many measurements; got " +
                                   std::to_string(Xs.rows()));
    Eigen::ColPivHouseholderQR<CMatrix> qr(Xs);
    qr.setThreshold(1e-10);
    if (qr.rank() < k)
        throw SingularSystemError("least squares: selected columns are rank deficient (rank " +
                                  std::to_string(qr.rank()) + " of " + std::to_string(k) + ")");
    return qr.solve(y);
}

/// Minimum-norm least squares, X_s^+ y. Equals ls_solve whenever X_s has full
/// column rank and stays defined when it does not.
inline CVector ls_solve_min_norm(const CMatrix& Xs, const CVector& y) {
    require_same_size(Xs.rows(), y.size(), "least squares: rows vs observations");
    if (Xs.cols() == 0) return CVector(0);
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(Xs);
    cod.setThreshold(1e-10);
    return cod.solve(y);
}

/// q_S = (X_S^* X_S)^{-1} X_S^* y, returned in the order of S.
inline CVector ls_debias(const CVector& y, const CMatrix& X, const IndexSet& s) {
    require_same_size(X.rows(), y.size(), "ls_debias");
    return ls_solve(select_columns(X, s), y);
}

/// Sign of the innovation relative to the blockage coefficient.
/// ReceivedMinusIdeal: q_n = (b_n - 1) a_n. IdealMinusDamaged: q_n = (1 - b_n) a_n.
enum class Convention { ReceivedMinusIdeal, IdealMinusDamaged };

struct BlockageEstimate {
    IndexSet support;
    RVector kappa;  // aligned with support
    RVector phi;    // [0, 2 pi)
};

/// kappa_n = |b_n|, phi_n = arg(b_n) with b_n recovered from q_n / a_n.
inline BlockageEstimate extract_blockage(const CVector& q_hat, const SteeringVector& a, const IndexSet& s,
                                         Convention conv = Convention::ReceivedMinusIdeal) {
    require_same_size(q_hat.size(), a.size(), "extract_blockage");
    BlockageEstimate e;
    e.support = s;
    e.kappa.resize(static_cast<Index>(s.size()));
    e.phi.resize(static_cast<Index>(s.size()));
    for (std::size_t j = 0; j < s.size(); ++j) {
        const Index n = s[j];
        const cplx ratio = q_hat[n] / a[n];
        const cplx b = conv == Convention::ReceivedMinusIdeal ? ratio + 1.0 : 1.0 - ratio;
        e.kappa[static_cast<Index>(j)] = std::abs(b);
        e.phi[static_cast<Index>(j)] = wrap_two_pi(std::arg(b));
    }
    return e;
}

struct DiagnosisReport {
    IndexSet support;
    CVector q_hat;   // zero off the support
    RVector kappa_hat;
    RVector phi_hat;
    std::optional<double> nmse_db;  // against ground truth when given and nonzero
    int iters = 0;
};

namespace detail {

inline DiagnosisReport finish_report(const MeasurementSet& ms, const SteeringVector& a, IndexSet support,
                                     const std::optional<CVector>& truth, Convention conv, int iters) {
    DiagnosisReport r;
    r.iters = iters;
    r.q_hat = CVector::Zero(ms.X.cols());
    const CVector qs = ls_debias(ms.y, ms.X, support);
    for (std::size_t j = 0; j < support.size(); ++j) r.q_hat[support[j]] = qs[static_cast<Index>(j)];
    const BlockageEstimate e = extract_blockage(r.q_hat, a, support, conv);
    r.support = std::move(support);
    r.kappa_hat = e.kappa;
    r.phi_hat = e.phi;
    if (truth && truth->squaredNorm() > 0.0) r.nmse_db = nmse_db(*truth, r.q_hat);
    return r;
}

}  // namespace detail

/// LASSO, support detection, LS debias and coefficient extraction.
/// `truth` is the innovation vector q = c o a used for the NMSE.
inline DiagnosisReport diagnose_rx(const MeasurementSet& ms, const SteeringVector& a, const LassoConfig& cfg,
                                   double tau_rel, const std::optional<CVector>& truth = std::nullopt,
                                   Convention conv = Convention::ReceivedMinusIdeal) {
    require_same_size(ms.X.cols(), a.size(), "diagnose_rx: sensing columns vs steering");
    require_same_size(ms.X.rows(), ms.y.size(), "diagnose_rx: sensing rows vs observations");
    if (!ms.X.allFinite()) throw InvalidArgument("diagnose_rx: sensing matrix contains non-finite values");
    const ApgResult sol = lasso_solve(DenseOperator(ms.X), ms.y, cfg);
    return detail::finish_report(ms, a, detect_support(sol.x, tau_rel), truth, conv, sol.iters);
}

/// Genie-aided LS baseline: the true support replaces detection.
inline DiagnosisReport diagnose_rx_genie(const MeasurementSet& ms, const SteeringVector& a,
                                         const IndexSet& true_support,
                                         const std::optional<CVector>& truth = std::nullopt,
                                         Convention conv = Convention::ReceivedMinusIdeal) {
    require_same_size(ms.X.cols(), a.size(), "diagnose_rx_genie: sensing columns vs steering");
    return detail::finish_report(ms, a, true_support, truth, conv, 0);
}

/// Innovation vector q = c o a of a blockage map, received-minus-ideal.
inline CVector innovation_vector(const BlockageMap& map, const SteeringVector& a) {
    require_same_size(map.size(), a.size(), "innovation_vector");
    return innovation_coeffs(map).cwiseProduct(a);
}

}  // namespace arraydoctor
