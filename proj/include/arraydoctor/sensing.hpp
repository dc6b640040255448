#pragma once

#include <arraydoctor/blockage.hpp>

#include <array>
#include <optional>

namespace arraydoctor {

/// Constant-modulus weights realizable by b-bit analog phase shifters.
struct PhaseShifterCodebook {
    int bits = 2;

    explicit PhaseShifterCodebook(int b = 2) : bits(b) {
        if (bits != 1 && bits != 2)
            throw InvalidArgument("unsupported phase-shifter resolution: " + std::to_string(bits) +
                                  " bits (1 or 2 supported)");
    }

    std::vector<cplx> alphabet() const {
        if (bits == 1) return {{1.0, 0.0}, {-1.0, 0.0}};
        return {{1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, {-1.0, -1.0}};
    }

    /// Nearest codebook symbol.
    cplx quantize(cplx v) const {
        const double re = v.real() >= 0.0 ? 1.0 : -1.0;
        if (bits == 1) return {re, 0.0};
        const double im = v.imag() >= 0.0 ? 1.0 : -1.0;
        return {re, im};
    }

    cplx draw(Rng& rng) const {
        const auto symbols = alphabet();
        std::uniform_int_distribution<std::size_t> pick(0, symbols.size() - 1);
        return symbols[pick(rng)];
    }
};

/// K x N matrix of i.i.d. codebook symbols; row k holds the weights of
/// measurement k and rows are drawn in order, so a longer draw from the same
/// stream extends a shorter one.
inline CMatrix random_weights(Index k, Index n, int bits, Rng& rng) {
    if (k < 1 || n < 1) throw InvalidArgument("random_weights: K and N must be >= 1");
    const PhaseShifterCodebook book(bits);
    CMatrix X(k, n);
    for (Index r = 0; r < k; ++r)
        for (Index c = 0; c < n; ++c) X(r, c) = book.draw(rng);
    return X;
}

struct Multipath {
    int num_paths = 3;                   // including the direct path
    double direct_energy_fraction = 0.9;

    void validate() const {
        if (num_paths < 1) throw InvalidArgument("multipath: num_paths must be >= 1");
        if (!(direct_energy_fraction > 0.0 && direct_energy_fraction <= 1.0))
            throw InvalidArgument("multipath: direct energy fraction must be in (0, 1]");
    }

    /// Expected |g_p|^2 of each indirect path relative to the unit direct path.
    double indirect_path_power() const {
        if (num_paths < 2) return 0.0;
        return (1.0 - direct_energy_fraction) / direct_energy_fraction / static_cast<double>(num_paths - 1);
    }
};

struct Impairments {
    double angle_jitter_deg = 0.0;  // half-width of the uniform theta/phi error
    std::optional<Multipath> multipath;

    bool none() const { return angle_jitter_deg == 0.0 && !multipath; }

    void validate() const {
        if (!(angle_jitter_deg >= 0.0) || !std::isfinite(angle_jitter_deg))
            throw InvalidArgument("angle jitter must be finite and non-negative");
        if (multipath) multipath->validate();
    }
};

/// Innovation observations y = X q + e of one diagnosis session.
struct MeasurementSet {
    CMatrix X;       // K x N, row k = weights of measurement k
    CVector y;       // K
    double rho = 1;  // effective SNR, linear; inf when noiseless

    Index measurements() const { return y.size(); }
    double noise_std() const { return std::sqrt(noise_variance(rho)); }
};

/// Receiver-only measurements (received minus ideal):
/// y_k = x_k^T (b o a(theta', phi')) - x_k^T a(theta, phi) + e_k.
///
/// (theta', phi') is the nominal direction plus a session-wide uniform error
/// when angle jitter is enabled. Indirect paths add g_p x_k^T (c o a(theta_p,
/// phi_p)) to every measurement at or after a uniformly drawn onset index.
inline MeasurementSet measure_rx(const ArrayGeometry& geom, const BlockageMap& map, const CMatrix& X,
                                 const Direction& dir, double rho, const Impairments& imp, Rng& rng) {
    geom.validate();
    imp.validate();
    require_same_size(map.size(), geom.size(), "measure_rx: blockage map vs array");
    require_same_size(X.cols(), geom.size(), "measure_rx: weight columns vs array");
    const double noise_var = noise_variance(rho);
    const Index k = X.rows();

    const SteeringVector a = steering_vector(geom, dir);
    Direction actual = dir;
    if (imp.angle_jitter_deg > 0.0) {
        const double h = deg_to_rad(imp.angle_jitter_deg);
        std::uniform_real_distribution<double> jitter(-h, h);
        actual.theta += jitter(rng);
        actual.phi += jitter(rng);
    }

    MeasurementSet ms;
    ms.X = X;
    ms.rho = rho;
    if (imp.angle_jitter_deg > 0.0) {
        const SteeringVector a_true = steering_vector(geom, actual);
        ms.y = X * map.b.cwiseProduct(a_true) - X * a;
    } else {
        ms.y = X * innovation_coeffs(map).cwiseProduct(a);
    }
    for (Index i = 0; i < k; ++i) ms.y[i] += complex_gaussian(rng, noise_var);

    if (imp.multipath && imp.multipath->num_paths > 1) {
        const CVector c = innovation_coeffs(map);
        const double power = imp.multipath->indirect_path_power();
        std::uniform_int_distribution<Index> onset_pick(0, k - 1);
        for (int p = 1; p < imp.multipath->num_paths; ++p) {
            const cplx gain = complex_gaussian(rng, power);
            const Direction path{pi * uniform01(rng), two_pi * uniform01(rng)};
            const Index onset = onset_pick(rng);
            const CVector qp = c.cwiseProduct(steering_vector(geom, path));
            const Index active = k - onset;
            ms.y.tail(active) += gain * (X.bottomRows(active) * qp);
        }
    }
    return ms;
}

// ---------------------------------------------------------------------------
// Row/column schedule for complete group blockages
// ---------------------------------------------------------------------------

/// How the fixed vectors w0 and p0 of the row/column schedule are chosen.
///
/// CoPhased: the codebook-quantized conjugate of a_y and a_x, so every
/// contiguous run of blocked elements adds up within +-45 degrees and a
/// weighted row or column sum can never cancel.
/// Random: i.i.d. codebook symbols.
enum class FixedWeights { CoPhased, Random };

struct GroupSchedule {
    CMatrix W;   // ny x ny, unitary
    CMatrix P;   // nx x nx, unitary
    CVector w0;  // ny
    CVector p0;  // nx
};

template <class Derived>
bool is_orthonormal(const Eigen::MatrixBase<Derived>& M, double tol = 1e-10) {
    if (M.rows() != M.cols()) return false;
    const CMatrix gram = M.adjoint() * M;
    return (gram - CMatrix::Identity(M.rows(), M.cols())).cwiseAbs().maxCoeff() <= tol;
}

/// Haar-distributed unitary matrix from the QR factorization of a complex
/// Gaussian matrix, with the phases of R's diagonal folded into Q.
inline CMatrix random_unitary(Index n, Rng& rng) {
    const CMatrix G = complex_gaussian_matrix(rng, n, n, 1.0);
    Eigen::HouseholderQR<CMatrix> qr(G);
    CMatrix Q = qr.householderQ() * CMatrix::Identity(n, n);
    const CMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index i = 0; i < n; ++i) {
        const double mag = std::abs(R(i, i));
        if (mag > 0.0) Q.col(i) *= R(i, i) / mag;
    }
    return Q;
}

inline GroupSchedule make_group_schedule(const ArrayGeometry& geom, const Direction& dir,
                                         FixedWeights mode, Rng& rng, int bits = 2) {
    geom.validate();
    const PhaseShifterCodebook book(bits);
    GroupSchedule s;
    s.W = random_unitary(geom.ny, rng);
    s.P = random_unitary(geom.nx, rng);
    s.w0.resize(geom.ny);
    s.p0.resize(geom.nx);
    if (mode == FixedWeights::CoPhased) {
        const CVector ay = axis_response_y(geom, dir);
        const CVector ax = axis_response_x(geom, dir);
        for (Index n = 0; n < geom.ny; ++n) s.w0[n] = book.quantize(std::conj(ay[n]));
        for (Index m = 0; m < geom.nx; ++m) s.p0[m] = book.quantize(std::conj(ax[m]));
    } else {
        for (Index n = 0; n < geom.ny; ++n) s.w0[n] = book.draw(rng);
        for (Index m = 0; m < geom.nx; ++m) s.p0[m] = book.draw(rng);
    }
    return s;
}

/// Innovation matrix of the group scheme, ideal minus damaged: A - A o B.
inline CMatrix group_innovation_matrix(const ArrayGeometry& geom, const BlockageMap& map,
                                       const Direction& dir) {
    const CMatrix A = response_matrix(geom, dir);
    return A - A.cwiseProduct(blockage_matrix(geom, map));
}

inline void check_schedule(const ArrayGeometry& geom, const GroupSchedule& s) {
    if (s.W.rows() != geom.ny || s.P.rows() != geom.nx || s.w0.size() != geom.ny ||
        s.p0.size() != geom.nx)
        throw DimensionError("group schedule does not match the array");
    if (!is_orthonormal(s.W)) throw InvalidArgument("group schedule: W is not orthonormal");
    if (!is_orthonormal(s.P)) throw InvalidArgument("group schedule: P is not orthonormal");
}

/// ny + nx measurements y_k = w_k^T A_s p_k + e_k. The first ny use row k of W
/// with p0 fixed, the last nx use w0 fixed with row k of P. The returned X is
/// the equivalent K x N matrix with row k = vec(w_k p_k^T)^T, so y = X vec(A_s) + e.
inline MeasurementSet measure_group(const ArrayGeometry& geom, const BlockageMap& map,
                                    const GroupSchedule& s, const Direction& dir, double rho, Rng& rng) {
    geom.validate();
    check_schedule(geom, s);
    require_same_size(map.size(), geom.size(), "measure_group: blockage map vs array");
    const double noise_var = noise_variance(rho);
    const Index ny = geom.ny, nx = geom.nx;

    MeasurementSet ms;
    ms.rho = rho;
    ms.X.resize(ny + nx, geom.size());
    for (Index k = 0; k < ny; ++k)
        ms.X.row(k) = (s.W.row(k).transpose() * s.p0.transpose()).reshaped().transpose();
    for (Index k = 0; k < nx; ++k)
        ms.X.row(ny + k) = (s.w0 * s.P.row(k)).reshaped().transpose();

    const CMatrix As = group_innovation_matrix(geom, map, dir);
    ms.y = ms.X * As.reshaped();
    for (Index i = 0; i < ms.y.size(); ++i) ms.y[i] += complex_gaussian(rng, noise_var);
    return ms;
}

// ---------------------------------------------------------------------------
// Joint transmitter/receiver measurements
// ---------------------------------------------------------------------------

struct JointMeasurementSet {
    CMatrix W;  // N_R x k_r receive weights
    CMatrix F;  // N_T x k_t transmit weights
    CMatrix Y;  // k_r x k_t innovations, received minus ideal
    double rho = 1.0;

    Index measurements() const { return Y.size(); }
};

/// A_s = (b o a)(b_T o a_T)^* - a a_T^*, N_R x N_T.
inline CMatrix joint_innovation_matrix(const SteeringVector& a, const SteeringVector& a_t,
                                       const BlockageMap& map_r, const BlockageMap& map_t) {
    require_same_size(a.size(), map_r.size(), "joint: receive map");
    require_same_size(a_t.size(), map_t.size(), "joint: transmit map");
    return map_r.b.cwiseProduct(a) * map_t.b.cwiseProduct(a_t).adjoint() - a * a_t.adjoint();
}

/// Y = W^* (A - A_I) F + E with codebook W (N_R x k_r) and F (N_T x k_t).
inline JointMeasurementSet measure_joint(const ArrayGeometry& rx_geom, const ArrayGeometry& tx_geom,
                                         const BlockageMap& map_r, const BlockageMap& map_t, Index kr,
                                         Index kt, const Direction& rx_dir, const Direction& tx_dir,
                                         double rho, int bits, Rng& rng) {
    rx_geom.validate();
    tx_geom.validate();
    require_same_size(map_r.size(), rx_geom.size(), "measure_joint: receive map vs array");
    require_same_size(map_t.size(), tx_geom.size(), "measure_joint: transmit map vs array");
    if (kr < 1 || kt < 1) throw InvalidArgument("measure_joint: k_r and k_t must be >= 1");
    const double noise_var = noise_variance(rho);

    const SteeringVector a = steering_vector(rx_geom, rx_dir);
    const SteeringVector a_t = steering_vector(tx_geom, tx_dir);

    JointMeasurementSet jms;
    jms.rho = rho;
    jms.W = random_weights(kr, rx_geom.size(), bits, rng).transpose();
    jms.F = random_weights(kt, tx_geom.size(), bits, rng).transpose();
    jms.Y = jms.W.adjoint() * joint_innovation_matrix(a, a_t, map_r, map_t) * jms.F;
    jms.Y += complex_gaussian_matrix(rng, kr, kt, noise_var);
    return jms;
}

}  // namespace arraydoctor
