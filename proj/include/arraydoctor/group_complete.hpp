#pragma once

#include <arraydoctor/sensing.hpp>

#include <bit>

namespace arraydoctor {

/// x1_hat ~ A_s p0 (length ny), x2_hat ~ (w0^T A_s)^T (length nx).
struct RowColEstimate {
    CVector x1_hat;
    CVector x2_hat;
};

/// ny x nx mask, true = faulty. The matrix B_hat of the refinement step is
/// the complement: its zero entries are the faulty elements.
struct FaultMask {
    using Bits = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
    Bits mask;

    static FaultMask empty(Index ny, Index nx) { return {Bits::Constant(ny, nx, false)}; }

    Index rows() const { return mask.rows(); }
    Index cols() const { return mask.cols(); }
    Index count() const { return mask.count(); }

    /// Faulty elements in vectorized order.
    IndexSet to_index_set() const {
        IndexSet s;
        for (Index m = 0; m < mask.cols(); ++m)
            for (Index n = 0; n < mask.rows(); ++n)
                if (mask(n, m)) s.push_back(vec_index(mask.rows(), m, n));
        return s;
    }

    static FaultMask from_index_set(const ArrayGeometry& g, const IndexSet& s) {
        FaultMask f = empty(g.ny, g.nx);
        for (Index i : s) {
            const auto [m, n] = grid_position(g, i);
            f.mask(n, m) = true;
        }
        return f;
    }

    /// B_hat: 1 for healthy elements, 0 for faulty ones.
    Eigen::MatrixXd healthy_matrix() const { return (!mask).cast<double>().matrix(); }

    bool operator==(const FaultMask& o) const {
        return mask.rows() == o.mask.rows() && mask.cols() == o.mask.cols() && (mask == o.mask).all();
    }
};

/// x_hat = Phi^* y with Phi = blockdiag(W, P).
inline RowColEstimate estimate_rowcol(const CVector& y, const CMatrix& W, const CMatrix& P) {
    if (!is_orthonormal(W)) throw InvalidArgument("estimate_rowcol: W is not orthonormal");
    if (!is_orthonormal(P)) throw InvalidArgument("estimate_rowcol: P is not orthonormal");
    require_same_size(y.size(), W.rows() + P.rows(), "estimate_rowcol: observations vs ny + nx");
    RowColEstimate e;
    e.x1_hat = W.adjoint() * y.head(W.rows());
    e.x2_hat = P.adjoint() * y.tail(P.rows());
    return e;
}

/// mask(n, m) = |x1_hat[n]| > tau_abs and |x2_hat[m]| > tau_abs.
inline FaultMask candidate_mask(const RowColEstimate& est, double tau_abs) {
    if (!(tau_abs >= 0.0)) throw InvalidArgument("tau_abs must be >= 0");
    const Index ny = est.x1_hat.size(), nx = est.x2_hat.size();
    FaultMask f = FaultMask::empty(ny, nx);
    for (Index m = 0; m < nx; ++m) {
        if (!(std::abs(est.x2_hat[m]) > tau_abs)) continue;
        for (Index n = 0; n < ny; ++n) f.mask(n, m) = std::abs(est.x1_hat[n]) > tau_abs;
    }
    return f;
}

/// Default nonzero test: three noise standard deviations of an x_hat entry,
/// floored at 1e-8 so noiseless sessions ignore rounding residue.
inline double default_tau_abs(double rho) { return std::max(3.0 * std::sqrt(noise_variance(rho)), 1e-8); }

struct Run {
    Index begin = 0;
    Index end = 0;  // one past the last
};

inline std::vector<Run> flagged_runs(const Eigen::Array<bool, Eigen::Dynamic, 1>& flags) {
    std::vector<Run> out;
    Index i = 0;
    while (i < flags.size()) {
        if (!flags[i]) {
            ++i;
            continue;
        }
        Index j = i;
        while (j < flags.size() && flags[j]) ++j;
        out.push_back({i, j});
        i = j;
    }
    return out;
}

struct Rectangle {
    Run rows;
    Run cols;

    Index size() const { return (rows.end - rows.begin) * (cols.end - cols.begin); }
};

/// Candidate rectangles: every maximal run of flagged rows crossed with every
/// maximal run of flagged columns of the mask.
inline std::vector<Rectangle> candidate_rectangles(const FaultMask& mask) {
    const Eigen::Array<bool, Eigen::Dynamic, 1> rows = mask.mask.rowwise().any();
    const Eigen::Array<bool, Eigen::Dynamic, 1> cols = mask.mask.colwise().any().transpose();
    std::vector<Rectangle> out;
    for (const Run& r : flagged_runs(rows))
        for (const Run& c : flagged_runs(cols)) out.push_back({r, c});
    return out;
}

inline constexpr std::uint64_t default_refine_budget = std::uint64_t{1} << 20;

struct RefineResult {
    FaultMask mask;
    double residual = 0.0;
    Index candidates = 0;
    bool searched = false;
};

/// Chooses the union of candidate rectangles D minimizing
/// ||x_hat - [(A o D) p0; ((A o D)^T w0)]||_2, where A o D = A - A o B_hat is
/// the innovation of a complete blockage on D. Ties go to fewer blocked
/// elements. A single candidate is returned unchanged.
inline RefineResult refine_mask(const RowColEstimate& est, const FaultMask& mask, const CMatrix& A,
                                const CVector& w0, const CVector& p0,
                                std::uint64_t budget = default_refine_budget) {
    const Index ny = A.rows(), nx = A.cols();
    if (mask.rows() != ny || mask.cols() != nx || est.x1_hat.size() != ny || est.x2_hat.size() != nx ||
        w0.size() != ny || p0.size() != nx)
        throw DimensionError("refine_mask: inputs do not match the array");

    const std::vector<Rectangle> rects = candidate_rectangles(mask);
    RefineResult out;
    out.candidates = static_cast<Index>(rects.size());
    out.mask = mask;
    if (rects.size() <= 1) return out;
    if (rects.size() >= 63 || (std::uint64_t{1} << rects.size()) > budget)
        throw BudgetExceededError("refinement over " + std::to_string(rects.size()) +
                                  " candidate rectangles exceeds the search budget; use the compressed-sensing pipeline");

    // each rectangle adds a fixed vector to the prediction because candidates never overlap
    const Index len = ny + nx;
    std::vector<CVector> contrib(rects.size());
    std::vector<Index> sizes(rects.size());
    for (std::size_t r = 0; r < rects.size(); ++r) {
        CMatrix Ad = CMatrix::Zero(ny, nx);
        const Rectangle& rc = rects[r];
        Ad.block(rc.rows.begin, rc.cols.begin, rc.rows.end - rc.rows.begin, rc.cols.end - rc.cols.begin) =
            A.block(rc.rows.begin, rc.cols.begin, rc.rows.end - rc.rows.begin, rc.cols.end - rc.cols.begin);
        contrib[r].resize(len);
        contrib[r].head(ny) = Ad * p0;
        contrib[r].tail(nx) = Ad.transpose() * w0;
        sizes[r] = rc.size();
    }
    CVector x_hat(len);
    x_hat << est.x1_hat, est.x2_hat;

    // Gray-code walk: one rectangle toggles per step
    const std::uint64_t total = std::uint64_t{1} << rects.size();
    CVector residual = x_hat;
    Index elements = 0;
    std::uint64_t code = 0;
    double best = residual.norm();
    Index best_elements = 0;
    std::uint64_t best_code = 0;
    const double tie = 1e-12 * std::max(1.0, x_hat.norm());
    for (std::uint64_t i = 1; i < total; ++i) {
        const int bit = std::countr_zero(i);
        const std::uint64_t flip = std::uint64_t{1} << bit;
        if (code & flip) {
            residual += contrib[static_cast<std::size_t>(bit)];
            elements -= sizes[static_cast<std::size_t>(bit)];
        } else {
            residual -= contrib[static_cast<std::size_t>(bit)];
            elements += sizes[static_cast<std::size_t>(bit)];
        }
        code ^= flip;
        const double res = residual.norm();
        if (res < best - tie || (res <= best + tie && elements < best_elements)) {
            best = res;
            best_elements = elements;
            best_code = code;
        }
    }

    out.searched = true;
    out.residual = best;
    out.mask = FaultMask::empty(ny, nx);
    for (std::size_t r = 0; r < rects.size(); ++r) {
        if (!(best_code & (std::uint64_t{1} << r))) continue;
        const Rectangle& rc = rects[r];
        out.mask.mask.block(rc.rows.begin, rc.cols.begin, rc.rows.end - rc.rows.begin, rc.cols.end - rc.cols.begin) =
            true;
    }
    return out;
}

struct GroupDiagnosis {
    FaultMask mask;
    FaultMask candidates;
    RowColEstimate estimate;
    Index rectangles = 0;
    bool refined = false;
};

/// Row/column estimation, mask intersection and refinement for complete
/// group blockages measured with measure_group.
inline GroupDiagnosis diagnose_group(const MeasurementSet& ms, const ArrayGeometry& geom, const GroupSchedule& s,
                                     const Direction& dir, double tau_abs,
                                     std::uint64_t budget = default_refine_budget) {
    geom.validate();
    check_schedule(geom, s);
    require_same_size(ms.y.size(), geom.nx + geom.ny, "diagnose_group: measurement count vs nx + ny");
    GroupDiagnosis d;
    d.estimate = estimate_rowcol(ms.y, s.W, s.P);
    d.candidates = candidate_mask(d.estimate, tau_abs);
    const RefineResult r = refine_mask(d.estimate, d.candidates, response_matrix(geom, dir), s.w0, s.p0, budget);
    d.mask = r.mask;
    d.rectangles = r.candidates;
    d.refined = r.searched;
    return d;
}

}  // namespace arraydoctor
