#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace arraydoctor {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Sorted list of element indices in vectorized (column-stacked) order.
using IndexSet = std::vector<Index>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class SingularSystemError : public Error {
public:
    using Error::Error;
};

class UnderdeterminedError : public Error {
public:
    using Error::Error;
};

class PlacementError : public Error {
public:
    using Error::Error;
};

class BudgetExceededError : public Error {
public:
    using Error::Error;
};

class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

class DegenerateSupportError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

inline void require_same_size(Index a, Index b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": size " + std::to_string(a) +
                             " does not match " + std::to_string(b));
    }
}

template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
    return m.allFinite();
}

// ---------------------------------------------------------------------------
// Units. Conversions happen once at the interface boundary.
// ---------------------------------------------------------------------------

inline double db_to_linear(double db) {
    if (std::isinf(db) && db > 0) return std::numeric_limits<double>::infinity();
    return std::pow(10.0, db / 10.0);
}

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline double deg_to_rad(double deg) { return deg * pi / 180.0; }

inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

// ---------------------------------------------------------------------------
// Random streams
//
// Every experiment derives independent engines from one master seed with a
// counter: stream(seed, i) mixes (seed, i) through splitmix64 and seeds a
// mt19937_64 from the result. No global RNG state exists anywhere.
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t counter) {
    return splitmix64(splitmix64(master) ^ splitmix64(counter + 0x632BE59BD9B4E019ULL));
}

inline Rng stream(std::uint64_t master, std::uint64_t counter) {
    return Rng(stream_seed(master, counter));
}

/// Uniform on [0, 1).
inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
inline cplx complex_gaussian(Rng& rng, double variance) {
    if (variance <= 0.0) return {0.0, 0.0};
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

inline CVector complex_gaussian_vector(Rng& rng, Index n, double variance) {
    CVector v(n);
    for (Index i = 0; i < n; ++i) v[i] = complex_gaussian(rng, variance);
    return v;
}

inline CMatrix complex_gaussian_matrix(Rng& rng, Index rows, Index cols, double variance) {
    CMatrix m(rows, cols);
    // column-major fill keeps the draw order tied to the storage order
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) m(r, c) = complex_gaussian(rng, variance);
    return m;
}

/// Noise variance for effective SNR rho (linear). rho = inf means noiseless.
inline double noise_variance(double rho) {
    if (!(rho > 0.0)) throw InvalidArgument("effective SNR must be positive");
    if (std::isinf(rho)) return 0.0;
    return 1.0 / rho;
}

/// Wrap an angle into [0, 2*pi).
inline double wrap_two_pi(double angle) {
    double r = std::fmod(angle, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

}  // namespace arraydoctor
