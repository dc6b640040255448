// One receive-array diagnosis: random partial blockages on a 16x16 array,
// 60 random-beam measurements at 10 dB, LASSO + LS.

#include <arraydoctor/arraydoctor.hpp>

#include <cstdio>

using namespace arraydoctor;

int main() {
    const ArrayGeometry g{16, 16, 0.5, 0.5};
    const Direction dir = Direction::from_degrees(60.0, 30.0);
    const SteeringVector a = steering_vector(g, dir);
    const double rho = db_to_linear(10.0);

    Rng rng = stream(7, 0);
    const BlockageMap map = sample_blockage_fixed_count(g.size(), 4, BlockageModel::random_partial(), rng);
    const CMatrix X = random_weights(60, g.size(), 2, rng);
    const MeasurementSet ms = measure_rx(g, map, X, dir, rho, {}, rng);

    const CVector q = innovation_vector(map, a);
    const DiagnosisReport r = diagnose_rx(ms, a, LassoConfig::defaults(g.size(), rho), 0.1, q);

    std::printf("element  true kappa  true phi   est kappa  est phi\n");
    for (std::size_t j = 0; j < r.support.size(); ++j) {
        const Index n = r.support[j];
        std::printf("%7lld  %10.4f  %8.4f  %10.4f  %8.4f\n", static_cast<long long>(n), std::abs(map.b[n]),
                    wrap_two_pi(std::arg(map.b[n])), r.kappa_hat[static_cast<Index>(j)],
                    r.phi_hat[static_cast<Index>(j)]);
    }
    std::printf("true faults: %zu  detected: %zu  NMSE %.2f dB\n", map.blocked.size(), r.support.size(), *r.nmse_db);
}
