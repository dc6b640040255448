#pragma once

#include <arraydoctor/blockage.hpp>

namespace arraydoctor {

struct MeanVar {
    cplx mean{0.0, 0.0};
    double variance = 0.0;
};

/// Normalized Dirichlet kernel sin(N g)/(N sin g) * exp(j (N-1) g).
///
/// At sin(g) = 0 every term of the underlying geometric sum equals one, so the
/// kernel is exactly 1 there.
inline cplx dirichlet_kernel(Index nx, double gamma) {
    const double n = static_cast<double>(nx);
    const double s = std::sin(gamma);
    if (std::abs(s) < 1e-12) {
        // exp(j 2 gamma m) with gamma = k*pi is 1 for every m
        return {1.0, 0.0};
    }
    return (std::sin(n * gamma) / (n * s)) * std::polar(1.0, (n - 1.0) * gamma);
}

/// gamma = pi * dx_norm * (cos(phi) - cos(phi_t))
inline double sidelobe_gamma(double dx_norm, double phi, double phi_t) {
    return pi * dx_norm * (std::cos(phi) - std::cos(phi_t));
}

/// Mainlobe (phi = phi_t) mean and variance of the unit-normalized pattern.
///
/// Complete: (1 - pb, 0). Constant beta: (1 - pb + pb beta, 0).
/// Random alpha: (1 - pb + pb E[alpha], pb var[alpha]).
inline MeanVar mainlobe_stats(double pb, const BlockageModel& model) {
    if (!(pb >= 0.0 && pb <= 1.0)) throw InvalidArgument("blockage probability must be in [0,1]");
    MeanVar out;
    out.mean = cplx{1.0 - pb, 0.0} + pb * model.mean_alpha();
    out.variance = model.is_deterministic() ? 0.0 : pb * model.variance_alpha();
    return out;
}

/// Sidelobe (phi != phi_t) mean and variance for a linear array of nx elements.
inline MeanVar sidelobe_stats(double pb, const BlockageModel& model, Index nx, double dx_norm,
                              double phi, double phi_t) {
    if (!(pb >= 0.0 && pb <= 1.0)) throw InvalidArgument("blockage probability must be in [0,1]");
    if (nx < 1) throw InvalidArgument("nx must be positive");
    const double n = static_cast<double>(nx);
    const cplx d = dirichlet_kernel(nx, sidelobe_gamma(dx_norm, phi, phi_t));
    const cplx mean_b = cplx{1.0, 0.0} - pb * (cplx{1.0, 0.0} - model.mean_alpha());

    MeanVar out;
    out.mean = mean_b * d;
    switch (model.kind) {
        case BlockageModel::Kind::Complete:
            out.variance = pb * (1.0 - pb) / n;
            break;
        case BlockageModel::Kind::ConstantPartial:
            // squared magnitude of the mean, so complex beta stays non-negative
            out.variance = (1.0 - pb + pb * std::norm(model.beta)) / n - std::norm(mean_b) / n;
            break;
        case BlockageModel::Kind::RandomPartial:
            out.variance = pb / n *
                           (1.0 - pb + model.second_moment_alpha() - pb * std::norm(model.mean_alpha()));
            break;
    }
    out.variance = std::max(0.0, out.variance);
    return out;
}

/// Monte Carlo estimate with standard errors of each estimated quantity.
struct EmpiricalStats {
    cplx mean{0.0, 0.0};
    double variance = 0.0;
    double stderr_mean_re = 0.0;
    double stderr_mean_im = 0.0;
    double stderr_variance = 0.0;
    Index trials = 0;
};

/// Which spread the Monte Carlo variance measures.
///
/// Total: plain sample variance of the pattern over blockage draws.
/// IntensityPerElement: variance caused by the coefficients alone with the
/// blocked set held fixed, scaled by the element count (the fixed-fault-count
/// reading of the mainlobe table). Estimated without bias from two coefficient
/// draws on the same blocked set: N/2 |g - g'|^2.
enum class Spread { Total, IntensityPerElement };

/// Steered uniform linear-array weights w_m = exp(-j m 2 pi dx cos(phi_t)) / nx
/// on the azimuth cut theta = pi/2.
inline WeightVector steered_linear_weights(Index nx, double dx_norm, double phi_t) {
    WeightVector w(nx);
    const double k = two_pi * dx_norm * std::cos(phi_t);
    for (Index m = 0; m < nx; ++m)
        w[m] = std::polar(1.0 / static_cast<double>(nx), -k * static_cast<double>(m));
    return w;
}

/// Monte Carlo pattern statistics for the linear array (geom.ny == 1) steered
/// to phi_t and observed at phi, theta = pi/2. Trial t uses stream(seed, t).
inline EmpiricalStats empirical_pattern_stats(const ArrayGeometry& geom, double pb,
                                              const BlockageModel& model, double phi, double phi_t,
                                              Index trials, std::uint64_t seed,
                                              Spread spread = Spread::Total) {
    geom.validate();
    if (geom.ny != 1) throw InvalidArgument("pattern statistics are defined for linear arrays (ny = 1)");
    if (trials < 2) throw InvalidArgument("need at least two trials");
    const Index n = geom.nx;
    const WeightVector w = steered_linear_weights(n, geom.dx_norm, phi_t);
    const SteeringVector a = steering_vector(geom, Direction{pi / 2.0, phi});
    const CVector wa = w.cwiseProduct(a);

    std::vector<cplx> g(static_cast<std::size_t>(trials));
    std::vector<double> paired(spread == Spread::IntensityPerElement ? static_cast<std::size_t>(trials) : 0);
    for (Index t = 0; t < trials; ++t) {
        Rng rng = stream(seed, static_cast<std::uint64_t>(t));
        BlockageMap map = sample_blockage(n, pb, model, rng);
        g[static_cast<std::size_t>(t)] = (wa.transpose() * map.b).value();
        if (spread == Spread::IntensityPerElement) {
            CVector b2 = map.b;
            for (Index i : map.blocked) b2[i] = draw_alpha(model, rng);
            const cplx g2 = (wa.transpose() * b2).value();
            paired[static_cast<std::size_t>(t)] =
                0.5 * static_cast<double>(n) * std::norm(g[static_cast<std::size_t>(t)] - g2);
        }
    }

    const double nt = static_cast<double>(trials);
    cplx mean{0.0, 0.0};
    for (const cplx& v : g) mean += v;
    mean /= nt;
    double var_re = 0.0, var_im = 0.0;
    for (const cplx& v : g) {
        var_re += (v.real() - mean.real()) * (v.real() - mean.real());
        var_im += (v.imag() - mean.imag()) * (v.imag() - mean.imag());
    }
    var_re /= (nt - 1.0);
    var_im /= (nt - 1.0);

    EmpiricalStats out;
    out.trials = trials;
    out.mean = mean;
    out.stderr_mean_re = std::sqrt(var_re / nt);
    out.stderr_mean_im = std::sqrt(var_im / nt);

    if (spread == Spread::Total) {
        // unbiased sample variance of a complex variable, with the standard
        // error of the estimator from the spread of |g - mean|^2
        std::vector<double> d2(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) d2[i] = std::norm(g[i] - mean);
        double s = 0.0;
        for (double v : d2) s += v;
        out.variance = s / (nt - 1.0);
        const double m = s / nt;
        double s2 = 0.0;
        for (double v : d2) s2 += (v - m) * (v - m);
        out.stderr_variance = std::sqrt(s2 / (nt - 1.0) / nt);
    } else {
        double s = 0.0;
        for (double v : paired) s += v;
        out.variance = s / nt;
        double s2 = 0.0;
        for (double v : paired) s2 += (v - out.variance) * (v - out.variance);
        out.stderr_variance = std::sqrt(s2 / (nt - 1.0) / nt);
    }
    return out;
}

}  // namespace arraydoctor
