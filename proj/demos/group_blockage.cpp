// Complete group blockage on an 8x8 array found with nx + ny = 16
// measurements: row/column estimates, mask intersection, refinement.

#include <arraydoctor/arraydoctor.hpp>

#include <cstdio>

using namespace arraydoctor;

namespace {

void print_mask(const char* title, const FaultMask& m) {
    std::printf("%s\n", title);
    for (Index n = 0; n < m.rows(); ++n) {
        for (Index c = 0; c < m.cols(); ++c) std::printf("%c", m.mask(n, c) ? 'X' : '.');
        std::printf("\n");
    }
}

}  // namespace

int main() {
    const ArrayGeometry g{8, 8, 0.5, 0.5};
    const Direction dir = Direction::from_degrees(60.0, 30.0);
    const double rho = db_to_linear(15.0);

    Rng truth = stream(12, 0);
    const BlockageMap map = place_group_blockage(g, 2, GroupShape{2, 3}, BlockageModel::complete(), truth);
    Rng meas = stream(12, 1);
    const GroupSchedule s = make_group_schedule(g, dir, FixedWeights::CoPhased, meas);
    const MeasurementSet ms = measure_group(g, map, s, dir, rho, meas);

    const GroupDiagnosis d = diagnose_group(ms, g, s, dir, default_tau_abs(rho));
    print_mask("truth", FaultMask::from_index_set(g, map.blocked));
    print_mask("mask intersection", d.candidates);
    print_mask("after refinement", d.mask);
    std::printf("candidate rectangles: %lld, exact: %s\n", static_cast<long long>(d.rectangles),
                d.mask == FaultMask::from_index_set(g, map.blocked) ? "yes" : "no");
}
