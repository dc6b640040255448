// Joint transmit/receive diagnosis of a 4x4 receiver and an 8x4 transmitter.

#include <arraydoctor/arraydoctor.hpp>

#include <cstdio>

using namespace arraydoctor;

namespace {

void print_set(const char* label, const IndexSet& s) {
    std::printf("%s:", label);
    for (Index i : s) std::printf(" %lld", static_cast<long long>(i));
    std::printf("\n");
}

}  // namespace

int main() {
    const ArrayGeometry rx{4, 4, 0.5, 0.5}, tx{8, 4, 0.5, 0.5};
    const Direction rx_dir = Direction::from_degrees(60.0, 30.0), tx_dir = Direction::from_degrees(50.0, -20.0);
    const SteeringVector a = steering_vector(rx, rx_dir), a_t = steering_vector(tx, tx_dir);
    const double rho = db_to_linear(10.0);

    Rng rng = stream(5, 0);
    const BlockageMap mr = sample_blockage_fixed_count(rx.size(), 2, BlockageModel::random_partial(), rng);
    const BlockageMap mt = sample_blockage_fixed_count(tx.size(), 3, BlockageModel::random_partial(), rng);
    const JointMeasurementSet jms = measure_joint(rx, tx, mr, mt, 14, 28, rx_dir, tx_dir, rho, 2, rng);

    const JointReport r = diagnose_joint(jms, a, a_t, JointConfig::defaults(rx.size(), tx.size(), rho));
    print_set("receive faults (true)", mr.blocked);
    print_set("receive faults (found)", r.faulty_r);
    print_set("transmit faults (true)", mt.blocked);
    print_set("transmit faults (found)", r.faulty_t);
    std::printf("receive NMSE %.2f dB, transmit NMSE %.2f dB\n", nmse_db(innovation_vector(mr, a), r.q_r_hat),
                nmse_db(innovation_vector(mt, a_t), r.q_t_hat));
}
