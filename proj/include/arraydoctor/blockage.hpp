#pragma once

#include <arraydoctor/array_model.hpp>

#include <algorithm>

namespace arraydoctor {

/// Fault model for a blocked element, alpha = kappa * exp(j Phi).
struct BlockageModel {
    enum class Kind { Complete, ConstantPartial, RandomPartial };

    Kind kind = Kind::RandomPartial;
    cplx beta{0.0, 0.0};  // ConstantPartial only

    static BlockageModel complete() { return {Kind::Complete, {0.0, 0.0}}; }
    static BlockageModel constant_partial(cplx beta) {
        if (!(std::abs(beta) <= 1.0)) throw InvalidArgument("|beta| must be <= 1");
        return {Kind::ConstantPartial, beta};
    }
    /// kappa ~ U[0,1], Phi ~ U[0, 2pi), independent per element.
    static BlockageModel random_partial() { return {Kind::RandomPartial, {0.0, 0.0}}; }

    bool is_deterministic() const { return kind != Kind::RandomPartial; }

    /// E[alpha]
    cplx mean_alpha() const {
        switch (kind) {
            case Kind::Complete: return {0.0, 0.0};
            case Kind::ConstantPartial: return beta;
            case Kind::RandomPartial: return {0.0, 0.0};
        }
        return {};
    }

    /// E[|alpha|^2]
    double second_moment_alpha() const {
        switch (kind) {
            case Kind::Complete: return 0.0;
            case Kind::ConstantPartial: return std::norm(beta);
            case Kind::RandomPartial: return 1.0 / 3.0;
        }
        return 0.0;
    }

    /// var[alpha] = E|alpha|^2 - |E alpha|^2
    double variance_alpha() const { return second_moment_alpha() - std::norm(mean_alpha()); }
};

inline const char* to_string(BlockageModel::Kind k) {
    switch (k) {
        case BlockageModel::Kind::Complete: return "complete";
        case BlockageModel::Kind::ConstantPartial: return "constant_partial";
        case BlockageModel::Kind::RandomPartial: return "random_partial";
    }
    return "?";
}

/// Per-element coefficients b (1 where healthy) and the true fault support.
struct BlockageMap {
    CVector b;
    IndexSet blocked;

    static BlockageMap healthy(Index n) { return {CVector::Ones(n), {}}; }

    Index size() const { return b.size(); }
};

/// One blockage coefficient. Draws that land exactly on 1 are rejected so the
/// fault support stays well defined.
inline cplx draw_alpha(const BlockageModel& model, Rng& rng) {
    switch (model.kind) {
        case BlockageModel::Kind::Complete: return {0.0, 0.0};
        case BlockageModel::Kind::ConstantPartial:
            if (model.beta == cplx{1.0, 0.0})
                throw InvalidArgument("beta = 1 is not a fault; blocked elements must differ from 1");
            return model.beta;
        case BlockageModel::Kind::RandomPartial:
            for (;;) {
                const double kappa = uniform01(rng);
                const double phase = two_pi * uniform01(rng);
                const cplx alpha = std::polar(kappa, phase);
                if (alpha != cplx{1.0, 0.0}) return alpha;
            }
    }
    return {};
}

/// Each of the n elements is blocked independently with probability pb.
inline BlockageMap sample_blockage(Index n, double pb, const BlockageModel& model, Rng& rng) {
    if (n < 1) throw InvalidArgument("element count must be positive");
    if (!(pb >= 0.0 && pb <= 1.0)) throw InvalidArgument("blockage probability must be in [0,1]");
    BlockageMap map = BlockageMap::healthy(n);
    for (Index i = 0; i < n; ++i) {
        if (uniform01(rng) < pb) {
            map.b[i] = draw_alpha(model, rng);
            map.blocked.push_back(i);
        }
    }
    return map;
}

/// Blocked elements chosen uniformly without replacement, exactly `count` of them.
inline BlockageMap sample_blockage_fixed_count(Index n, Index count, const BlockageModel& model,
                                               Rng& rng) {
    if (count < 0 || count > n) throw InvalidArgument("fault count out of range");
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    // partial Fisher-Yates
    for (Index i = 0; i < count; ++i) {
        const auto j = i + static_cast<Index>(std::uniform_int_distribution<Index>(0, n - 1 - i)(rng));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    IndexSet chosen(idx.begin(), idx.begin() + count);
    std::sort(chosen.begin(), chosen.end());
    BlockageMap map = BlockageMap::healthy(n);
    for (Index i : chosen) map.b[i] = draw_alpha(model, rng);
    map.blocked = std::move(chosen);
    return map;
}

/// rows along y, cols along x.
struct GroupShape {
    Index rows = 1;
    Index cols = 1;

    Index size() const { return rows * cols; }
};

/// Top-left corner (row n0 along y, column m0 along x) of a placed group.
struct GroupPlacement {
    Index row = 0;
    Index col = 0;
};

/// Places `groups` non-overlapping rows x cols rectangles on the ny x nx grid.
/// Rectangles never wrap the grid edge. Every element of a group draws its own
/// coefficient.
inline BlockageMap place_group_blockage(const ArrayGeometry& g, Index groups, GroupShape shape,
                                        const BlockageModel& model, Rng& rng,
                                        std::vector<GroupPlacement>* placements = nullptr,
                                        int max_retries = 1000) {
    g.validate();
    if (groups < 1) throw InvalidArgument("group count must be positive");
    if (shape.rows < 1 || shape.cols < 1 || shape.rows > g.ny || shape.cols > g.nx)
        throw PlacementError("group shape does not fit the array");
    if (groups * shape.size() > g.size())
        throw PlacementError("groups cover more elements than the array has");

    using Occupancy = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
    std::uniform_int_distribution<Index> row_pick(0, g.ny - shape.rows);
    std::uniform_int_distribution<Index> col_pick(0, g.nx - shape.cols);
    Occupancy occupied;
    std::vector<GroupPlacement> placed;

    // A greedy sequence can paint itself into a corner, so a group that finds
    // no free spot restarts the whole layout.
    bool done = false;
    for (int attempt = 0; attempt < max_retries && !done; ++attempt) {
        occupied = Occupancy::Constant(g.ny, g.nx, false);
        placed.clear();
        done = true;
        for (Index j = 0; j < groups && done; ++j) {
            bool ok = false;
            for (int tries = 0; tries < 100 && !ok; ++tries) {
                const Index r = row_pick(rng);
                const Index c = col_pick(rng);
                if (occupied.block(r, c, shape.rows, shape.cols).any()) continue;
                occupied.block(r, c, shape.rows, shape.cols) = true;
                placed.push_back({r, c});
                ok = true;
            }
            done = ok;
        }
    }
    if (!done)
        throw PlacementError("could not place " + std::to_string(groups) + " groups of " +
                             std::to_string(shape.rows) + "x" + std::to_string(shape.cols) +
                             " without overlap after " + std::to_string(max_retries) + " attempts");

    BlockageMap map = BlockageMap::healthy(g.size());
    for (Index m = 0; m < g.nx; ++m)
        for (Index n = 0; n < g.ny; ++n)
            if (occupied(n, m)) map.blocked.push_back(vec_index(g, m, n));
    // blocked is already sorted because vec_index grows with (m, n) in this loop order
    for (Index i : map.blocked) map.b[i] = draw_alpha(model, rng);
    if (placements) *placements = std::move(placed);
    return map;
}

/// c = b - 1; exactly zero off the fault support.
inline CVector innovation_coeffs(const BlockageMap& map) {
    CVector c = map.b;
    c.array() -= cplx{1.0, 0.0};
    return c;
}

/// ny x nx matrix B with B(n, m) = b[vec_index(m, n)].
inline CMatrix blockage_matrix(const ArrayGeometry& g, const BlockageMap& map) {
    return unvectorize(g, map.b);
}

}  // namespace arraydoctor
