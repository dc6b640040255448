#pragma once

#include <arraydoctor/core.hpp>

#include <optional>

namespace arraydoctor {

/// Uniform planar array: nx elements along x, ny along y, spacings in
/// wavelengths.
struct ArrayGeometry {
    Index nx = 1;
    Index ny = 1;
    double dx_norm = 0.5;
    double dy_norm = 0.5;

    Index size() const { return nx * ny; }

    void validate() const {
        if (nx < 1 || ny < 1) throw InvalidArgument("array dimensions must be >= 1");
        if (!std::isfinite(dx_norm) || !std::isfinite(dy_norm) || dx_norm < 0.0 || dy_norm < 0.0)
            throw InvalidArgument("element spacing must be finite and non-negative");
    }
};

/// Elevation theta and azimuth phi, radians.
struct Direction {
    double theta = pi / 2.0;
    double phi = 0.0;

    static Direction from_degrees(double theta_deg, double phi_deg) {
        return {deg_to_rad(theta_deg), deg_to_rad(phi_deg)};
    }
};

using SteeringVector = CVector;
using WeightVector = CVector;

/// Position of element (x index m, y index n) in every vectorized quantity.
///
/// vec() stacks the columns of an ny x nx matrix, so the y index runs fastest.
/// This is the only place the mapping is defined; group-blockage placement,
/// mask conversion and the Kronecker steering vector all go through it.
inline constexpr Index vec_index(Index ny, Index m, Index n) { return m * ny + n; }

inline Index vec_index(const ArrayGeometry& g, Index m, Index n) { return vec_index(g.ny, m, n); }

/// Inverse of vec_index: returns (m, n).
inline std::pair<Index, Index> grid_position(const ArrayGeometry& g, Index idx) {
    return {idx / g.ny, idx % g.ny};
}

inline CVector axis_response_x(const ArrayGeometry& g, const Direction& d) {
    const double k = two_pi * g.dx_norm * std::sin(d.theta) * std::cos(d.phi);
    CVector ax(g.nx);
    for (Index m = 0; m < g.nx; ++m) ax[m] = std::polar(1.0, k * static_cast<double>(m));
    return ax;
}

inline CVector axis_response_y(const ArrayGeometry& g, const Direction& d) {
    const double k = two_pi * g.dy_norm * std::sin(d.theta) * std::sin(d.phi);
    CVector ay(g.ny);
    for (Index n = 0; n < g.ny; ++n) ay[n] = std::polar(1.0, k * static_cast<double>(n));
    return ay;
}

/// a = a_x (x) a_y, entry vec_index(m, n) = [a_x]_m [a_y]_n.
inline SteeringVector steering_vector(const ArrayGeometry& g, const Direction& d) {
    g.validate();
    const CVector ax = axis_response_x(g, d);
    const CVector ay = axis_response_y(g, d);
    SteeringVector a(g.size());
    for (Index m = 0; m < g.nx; ++m)
        for (Index n = 0; n < g.ny; ++n) a[vec_index(g, m, n)] = ax[m] * ay[n];
    return a;
}

/// Array response matrix A = a_y a_x^T (ny x nx); vec(A) equals steering_vector.
inline CMatrix response_matrix(const ArrayGeometry& g, const Direction& d) {
    g.validate();
    return axis_response_y(g, d) * axis_response_x(g, d).transpose();
}

/// Far-field pattern x^T (b o a). Without b this is the ideal pattern.
inline cplx pattern(const WeightVector& weights, const SteeringVector& a,
                    const std::optional<CVector>& b = std::nullopt) {
    require_same_size(weights.size(), a.size(), "pattern: weights vs steering");
    if (!b) return (weights.transpose() * a).value();
    require_same_size(b->size(), a.size(), "pattern: blockage vs steering");
    return (weights.transpose() * b->cwiseProduct(a)).value();
}

/// Direct double sum over the ny x nx weight matrix; oracle for the
/// vectorized form.
inline cplx pattern_2d_direct(const ArrayGeometry& g, const CMatrix& W, const Direction& d) {
    g.validate();
    if (W.rows() != g.ny || W.cols() != g.nx)
        throw DimensionError("pattern_2d_direct: weight matrix must be ny x nx");
    const double kx = two_pi * g.dx_norm * std::sin(d.theta) * std::cos(d.phi);
    const double ky = two_pi * g.dy_norm * std::sin(d.theta) * std::sin(d.phi);
    cplx sum{0.0, 0.0};
    for (Index n = 0; n < g.ny; ++n) {
        for (Index m = 0; m < g.nx; ++m) {
            sum += W(n, m) * std::polar(1.0, kx * static_cast<double>(m)) *
                   std::polar(1.0, ky * static_cast<double>(n));
        }
    }
    return sum;
}

/// Column-stacking vec() of an ny x nx matrix.
inline CVector vectorize(const CMatrix& M) { return M.reshaped(); }

/// Inverse of vectorize for an array geometry.
inline CMatrix unvectorize(const ArrayGeometry& g, const CVector& v) {
    require_same_size(v.size(), g.size(), "unvectorize");
    return v.reshaped(g.ny, g.nx);
}

}  // namespace arraydoctor
