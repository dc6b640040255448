#pragma once

#include <arraydoctor/group_complete.hpp>
#include <arraydoctor/joint_diagnosis.hpp>
#include <arraydoctor/sensing.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace arraydoctor {

inline constexpr int config_schema_version = 1;

enum class ScenarioKind { PatternCut, Stats, DiagnoseRx, DiagnoseBlock, DiagnoseGroup, DiagnoseJoint };

inline const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::PatternCut: return "pattern_cut";
        case ScenarioKind::Stats: return "stats";
        case ScenarioKind::DiagnoseRx: return "diagnose_rx";
        case ScenarioKind::DiagnoseBlock: return "diagnose_block";
        case ScenarioKind::DiagnoseGroup: return "diagnose_group";
        case ScenarioKind::DiagnoseJoint: return "diagnose_joint";
    }
    return "?";
}

struct BlockedElement {
    Index index = 0;  // vectorized, 0-based
    cplx b{0.0, 0.0};
};

struct PatternCutSpec {
    Direction steer;
    double theta = pi / 2.0;
    std::vector<double> phi;  // radians
    std::vector<BlockedElement> blocked;
};

struct StatsSpec {
    std::vector<Index> nx;
    std::vector<double> pb;
    std::vector<BlockageModel> models;
    std::vector<double> phi;  // radians; phi == phi_t gives the mainlobe row
    double phi_t = pi / 2.0;
    double dx_norm = 0.5;
};

struct GroupSpec {
    Index count = 1;
    Index rows = 1;
    Index cols = 1;
};

struct JointPair {
    Index kr = 1;
    Index kt = 1;
};

struct ImpairmentVariant {
    std::string label = "none";
    Impairments impairments;
};

struct SolverSpec {
    std::optional<double> omega;  // default 2 sqrt(2 ln N)
    double sigma_floor = 1e-3;
    double tau_rel = 0.1;
    int max_iters = 2000;
    double rel_tol = 1e-8;
    Index block_h = 8;
    std::optional<double> lambda_g;  // default Omega sigma sqrt(h)
    std::optional<double> tau_abs;   // default 3 / sqrt(rho)
    FixedWeights fixed_weights = FixedWeights::CoPhased;
    std::uint64_t refine_budget = default_refine_budget;
    double faulty_fraction = 0.25;
    double prune_z = 3.0;
    JointEstimator joint_estimator = JointEstimator::Structured;
};

struct ScenarioConfig {
    int schema_version = config_schema_version;
    ScenarioKind scenario = ScenarioKind::DiagnoseRx;
    std::uint64_t seed = 1;
    Index trials = 100;
    unsigned threads = 0;  // 0 = hardware concurrency

    ArrayGeometry array{16, 16, 0.5, 0.5};
    std::optional<ArrayGeometry> tx_array;
    Direction direction = Direction::from_degrees(60.0, 30.0);
    Direction tx_direction = Direction::from_degrees(50.0, -20.0);

    BlockageModel model = BlockageModel::random_partial();
    std::vector<double> pb;
    std::vector<Index> faults;  // fixed fault counts, alternative to pb
    std::vector<GroupSpec> groups;

    std::vector<Index> K;
    std::vector<JointPair> joint_measurements;
    std::vector<double> rho_db{10.0};
    int bits = 2;
    std::vector<ImpairmentVariant> impairments{ImpairmentVariant{}};
    SolverSpec solver;

    PatternCutSpec pattern_cut;
    StatsSpec stats;
};

// ---------------------------------------------------------------------------
// Parsing. Every error names the offending field.
// ---------------------------------------------------------------------------

namespace detail {

using json = nlohmann::json;

[[noreturn]] inline void config_fail(const std::string& field, const std::string& msg) {
    throw ConfigError("config field '" + field + "': " + msg);
}

inline std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

inline double read_number(const json& v, const std::string& field) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    config_fail(field, "expected a number");
}

inline double read_finite(const json& v, const std::string& field) {
    const double x = read_number(v, field);
    if (!std::isfinite(x)) config_fail(field, "must be finite");
    return x;
}

inline Index read_positive_int(const json& v, const std::string& field) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) config_fail(field, "expected an integer");
    const auto x = v.get<long long>();
    if (x < 1) config_fail(field, "must be >= 1");
    return static_cast<Index>(x);
}

inline Index read_nonnegative_int(const json& v, const std::string& field) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) config_fail(field, "expected an integer");
    const auto x = v.get<long long>();
    if (x < 0) config_fail(field, "must be >= 0");
    return static_cast<Index>(x);
}

inline cplx read_complex(const json& v, const std::string& field) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2) return {read_finite(v[0], field + "[0]"), read_finite(v[1], field + "[1]")};
    if (v.is_object() && v.contains("re")) {
        const double im = v.contains("im") ? read_finite(v.at("im"), field + ".im") : 0.0;
        return {read_finite(v.at("re"), field + ".re"), im};
    }
    config_fail(field, "expected a complex number as [re, im] or {\"re\": .., \"im\": ..}");
}

/// A number, a list of numbers, or {"start", "stop", "step"} (inclusive).
inline std::vector<double> read_sweep(const json& v, const std::string& field) {
    std::vector<double> out;
    if (v.is_array()) {
        if (v.empty()) config_fail(field, "sweep must not be empty");
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_number(v[i], field + "[" + std::to_string(i) + "]"));
        return out;
    }
    if (v.is_object()) {
        for (const char* k : {"start", "stop", "step"})
            if (!v.contains(k)) config_fail(field, std::string("range sweep needs '") + k + "'");
        const double start = read_finite(v.at("start"), field + ".start");
        const double stop = read_finite(v.at("stop"), field + ".stop");
        const double step = read_finite(v.at("step"), field + ".step");
        if (!(step > 0.0)) config_fail(field + ".step", "must be > 0");
        if (stop < start) config_fail(field, "stop must be >= start");
        const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (n > 1000000) config_fail(field, "range has too many points");
        for (long long i = 0; i < n; ++i) out.push_back(start + static_cast<double>(i) * step);
        return out;
    }
    out.push_back(read_number(v, field));
    return out;
}

inline std::vector<Index> read_int_sweep(const json& v, const std::string& field) {
    std::vector<Index> out;
    for (double x : read_sweep(v, field)) {
        if (!std::isfinite(x) || x != std::floor(x)) config_fail(field, "values must be integers");
        if (x < 1) config_fail(field, "values must be >= 1");
        out.push_back(static_cast<Index>(x));
    }
    return out;
}

inline void check_keys(const json& obj, const std::string& field, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) config_fail(field.empty() ? "<root>" : field, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) config_fail(join_path(field, key), "unknown field");
    }
}

inline ArrayGeometry read_geometry(const json& v, const std::string& field) {
    check_keys(v, field, {"nx", "ny", "dx", "dy"});
    ArrayGeometry g;
    if (!v.contains("nx")) config_fail(field + ".nx", "is required");
    if (!v.contains("ny")) config_fail(field + ".ny", "is required");
    g.nx = read_positive_int(v.at("nx"), field + ".nx");
    g.ny = read_positive_int(v.at("ny"), field + ".ny");
    if (v.contains("dx")) g.dx_norm = read_finite(v.at("dx"), field + ".dx");
    if (v.contains("dy")) g.dy_norm = read_finite(v.at("dy"), field + ".dy");
    if (g.dx_norm < 0.0) config_fail(field + ".dx", "must be >= 0");
    if (g.dy_norm < 0.0) config_fail(field + ".dy", "must be >= 0");
    return g;
}

inline Direction read_direction_deg(const json& v, const std::string& field) {
    check_keys(v, field, {"theta", "phi"});
    if (!v.contains("theta") || !v.contains("phi")) config_fail(field, "needs 'theta' and 'phi' in degrees");
    return Direction::from_degrees(read_finite(v.at("theta"), field + ".theta"), read_finite(v.at("phi"), field + ".phi"));
}

inline BlockageModel read_model(const json& v, const std::string& field) {
    std::string name;
    std::optional<cplx> beta;
    if (v.is_string()) {
        name = v.get<std::string>();
    } else if (v.is_object()) {
        check_keys(v, field, {"kind", "beta"});
        if (!v.contains("kind") || !v.at("kind").is_string()) config_fail(field + ".kind", "is required");
        name = v.at("kind").get<std::string>();
        if (v.contains("beta")) beta = read_complex(v.at("beta"), field + ".beta");
    } else {
        config_fail(field, "expected a model name or {\"kind\", \"beta\"}");
    }
    if (name == "complete") return BlockageModel::complete();
    if (name == "random_partial") return BlockageModel::random_partial();
    if (name == "constant_partial") {
        if (!beta) config_fail(field + ".beta", "is required for constant_partial");
        if (!(std::abs(*beta) <= 1.0)) config_fail(field + ".beta", "|beta| must be <= 1");
        if (*beta == cplx{1.0, 0.0}) config_fail(field + ".beta", "beta = 1 is not a fault");
        return BlockageModel::constant_partial(*beta);
    }
    config_fail(field, "unknown model '" + name + "' (complete, constant_partial, random_partial)");
}

inline ImpairmentVariant read_impairment(const json& v, const std::string& field) {
    check_keys(v, field, {"label", "angle_jitter_deg", "multipath"});
    ImpairmentVariant out;
    if (v.contains("label")) {
        if (!v.at("label").is_string()) config_fail(field + ".label", "expected a string");
        out.label = v.at("label").get<std::string>();
        if (out.label.find_first_of(",\"\n") != std::string::npos)
            config_fail(field + ".label", "must not contain commas, quotes or newlines");
    }
    if (v.contains("angle_jitter_deg")) {
        out.impairments.angle_jitter_deg = read_finite(v.at("angle_jitter_deg"), field + ".angle_jitter_deg");
        if (out.impairments.angle_jitter_deg < 0.0) config_fail(field + ".angle_jitter_deg", "must be >= 0");
    }
    if (v.contains("multipath")) {
        const json& m = v.at("multipath");
        const std::string mf = field + ".multipath";
        check_keys(m, mf, {"num_paths", "direct_energy_fraction"});
        Multipath mp;
        if (m.contains("num_paths")) mp.num_paths = static_cast<int>(read_positive_int(m.at("num_paths"), mf + ".num_paths"));
        if (m.contains("direct_energy_fraction"))
            mp.direct_energy_fraction = read_finite(m.at("direct_energy_fraction"), mf + ".direct_energy_fraction");
        if (!(mp.direct_energy_fraction > 0.0 && mp.direct_energy_fraction <= 1.0))
            config_fail(mf + ".direct_energy_fraction", "must be in (0, 1]");
        out.impairments.multipath = mp;
    }
    return out;
}

inline SolverSpec read_solver(const json& v, const std::string& field) {
    check_keys(v, field,
               {"omega", "sigma_floor", "tau_rel", "max_iters", "rel_tol", "block_h", "lambda_g", "tau_abs",
                "fixed_weights", "refine_budget", "faulty_fraction", "prune_z", "joint_estimator"});
    SolverSpec s;
    auto f = [&](const char* k) { return join_path(field, k); };
    if (v.contains("omega")) {
        s.omega = read_finite(v.at("omega"), f("omega"));
        if (!(*s.omega > 0.0)) config_fail(f("omega"), "must be > 0");
    }
    if (v.contains("sigma_floor")) {
        s.sigma_floor = read_finite(v.at("sigma_floor"), f("sigma_floor"));
        if (s.sigma_floor < 0.0) config_fail(f("sigma_floor"), "must be >= 0");
    }
    if (v.contains("tau_rel")) {
        s.tau_rel = read_finite(v.at("tau_rel"), f("tau_rel"));
        if (!(s.tau_rel > 0.0 && s.tau_rel < 1.0)) config_fail(f("tau_rel"), "must be in (0, 1)");
    }
    if (v.contains("max_iters")) s.max_iters = static_cast<int>(read_positive_int(v.at("max_iters"), f("max_iters")));
    if (v.contains("rel_tol")) {
        s.rel_tol = read_finite(v.at("rel_tol"), f("rel_tol"));
        if (!(s.rel_tol > 0.0)) config_fail(f("rel_tol"), "must be > 0");
    }
    if (v.contains("block_h")) s.block_h = read_positive_int(v.at("block_h"), f("block_h"));
    if (v.contains("lambda_g")) {
        s.lambda_g = read_finite(v.at("lambda_g"), f("lambda_g"));
        if (!(*s.lambda_g > 0.0)) config_fail(f("lambda_g"), "must be > 0");
    }
    if (v.contains("tau_abs")) {
        s.tau_abs = read_finite(v.at("tau_abs"), f("tau_abs"));
        if (*s.tau_abs < 0.0) config_fail(f("tau_abs"), "must be >= 0");
    }
    if (v.contains("fixed_weights")) {
        const json& w = v.at("fixed_weights");
        if (!w.is_string()) config_fail(f("fixed_weights"), "expected \"co_phased\" or \"random\"");
        const std::string name = w.get<std::string>();
        if (name == "co_phased")
            s.fixed_weights = FixedWeights::CoPhased;
        else if (name == "random")
            s.fixed_weights = FixedWeights::Random;
        else
            config_fail(f("fixed_weights"), "expected \"co_phased\" or \"random\"");
    }
    if (v.contains("refine_budget"))
        s.refine_budget = static_cast<std::uint64_t>(read_positive_int(v.at("refine_budget"), f("refine_budget")));
    if (v.contains("faulty_fraction")) {
        s.faulty_fraction = read_finite(v.at("faulty_fraction"), f("faulty_fraction"));
        if (!(s.faulty_fraction >= 0.0 && s.faulty_fraction < 1.0)) config_fail(f("faulty_fraction"), "must be in [0, 1)");
    }
    if (v.contains("prune_z")) {
        s.prune_z = read_finite(v.at("prune_z"), f("prune_z"));
        if (s.prune_z < 0.0) config_fail(f("prune_z"), "must be >= 0");
    }
    if (v.contains("joint_estimator")) {
        const json& e = v.at("joint_estimator");
        const std::string name = e.is_string() ? e.get<std::string>() : "";
        if (name == "structured")
            s.joint_estimator = JointEstimator::Structured;
        else if (name == "averaging")
            s.joint_estimator = JointEstimator::Averaging;
        else
            config_fail(f("joint_estimator"), "expected \"structured\" or \"averaging\"");
    }
    return s;
}

inline PatternCutSpec read_pattern_cut(const json& v, const std::string& field) {
    check_keys(v, field, {"steer_deg", "theta_deg", "phi_deg", "blocked"});
    PatternCutSpec p;
    if (!v.contains("steer_deg")) config_fail(field + ".steer_deg", "is required");
    p.steer = read_direction_deg(v.at("steer_deg"), field + ".steer_deg");
    if (v.contains("theta_deg")) p.theta = deg_to_rad(read_finite(v.at("theta_deg"), field + ".theta_deg"));
    if (!v.contains("phi_deg")) config_fail(field + ".phi_deg", "is required");
    for (double d : read_sweep(v.at("phi_deg"), field + ".phi_deg")) {
        if (!std::isfinite(d)) config_fail(field + ".phi_deg", "values must be finite");
        p.phi.push_back(deg_to_rad(d));
    }
    if (v.contains("blocked")) {
        const json& b = v.at("blocked");
        if (!b.is_array()) config_fail(field + ".blocked", "expected a list");
        for (std::size_t i = 0; i < b.size(); ++i) {
            const std::string ef = field + ".blocked[" + std::to_string(i) + "]";
            check_keys(b[i], ef, {"index", "b"});
            if (!b[i].contains("index") || !b[i].contains("b")) config_fail(ef, "needs 'index' and 'b'");
            BlockedElement e;
            e.index = read_nonnegative_int(b[i].at("index"), ef + ".index");
            e.b = read_complex(b[i].at("b"), ef + ".b");
            if (!(std::abs(e.b) <= 1.0)) config_fail(ef + ".b", "|b| must be <= 1");
            p.blocked.push_back(e);
        }
    }
    return p;
}

inline StatsSpec read_stats(const json& v, const std::string& field) {
    check_keys(v, field, {"nx", "pb", "models", "phi_deg", "phi_t_deg", "dx"});
    StatsSpec s;
    for (const char* k : {"nx", "pb", "models", "phi_deg"})
        if (!v.contains(k)) config_fail(join_path(field, k), "is required");
    s.nx = read_int_sweep(v.at("nx"), field + ".nx");
    s.pb = read_sweep(v.at("pb"), field + ".pb");
    const json& m = v.at("models");
    if (!m.is_array() || m.empty()) config_fail(field + ".models", "expected a non-empty list");
    for (std::size_t i = 0; i < m.size(); ++i) s.models.push_back(read_model(m[i], field + ".models[" + std::to_string(i) + "]"));
    for (double d : read_sweep(v.at("phi_deg"), field + ".phi_deg")) s.phi.push_back(deg_to_rad(d));
    if (v.contains("phi_t_deg")) s.phi_t = deg_to_rad(read_finite(v.at("phi_t_deg"), field + ".phi_t_deg"));
    if (v.contains("dx")) s.dx_norm = read_finite(v.at("dx"), field + ".dx");
    for (double p : s.pb)
        if (!(p >= 0.0 && p <= 1.0)) config_fail(field + ".pb", "probabilities must be in [0, 1]");
    return s;
}

}  // namespace detail

/// Builds and validates a configuration from parsed JSON.
inline ScenarioConfig parse_config(const nlohmann::json& j) {
    using namespace detail;
    check_keys(j, "",
               {"schema_version", "scenario", "description", "seed", "trials", "threads", "array", "tx_array",
                "direction_deg", "tx_direction_deg", "model", "pb", "faults", "groups", "K", "measurements",
                "rho_db", "bits", "impairments", "solver", "pattern_cut", "stats"});
    ScenarioConfig c;

    if (!j.contains("schema_version")) config_fail("schema_version", "is required");
    if (!j.at("schema_version").is_number_integer()) config_fail("schema_version", "expected an integer");
    c.schema_version = j.at("schema_version").get<int>();
    if (c.schema_version != config_schema_version)
        config_fail("schema_version", "unsupported version " + std::to_string(c.schema_version) + " (expected " +
                                          std::to_string(config_schema_version) + ")");

    if (!j.contains("scenario") || !j.at("scenario").is_string()) config_fail("scenario", "is required");
    const std::string name = j.at("scenario").get<std::string>();
    bool known = false;
    for (ScenarioKind k : {ScenarioKind::PatternCut, ScenarioKind::Stats, ScenarioKind::DiagnoseRx,
                           ScenarioKind::DiagnoseBlock, ScenarioKind::DiagnoseGroup, ScenarioKind::DiagnoseJoint}) {
        if (name == to_string(k)) {
            c.scenario = k;
            known = true;
        }
    }
    if (!known) config_fail("scenario", "unknown scenario '" + name + "'");

    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) config_fail("seed", "expected an integer");
        if (j.at("seed").is_number_integer() && j.at("seed").get<long long>() < 0) config_fail("seed", "must be >= 0");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("trials")) c.trials = read_positive_int(j.at("trials"), "trials");
    if (j.contains("threads")) c.threads = static_cast<unsigned>(read_nonnegative_int(j.at("threads"), "threads"));
    if (j.contains("array")) c.array = read_geometry(j.at("array"), "array");
    if (j.contains("tx_array")) c.tx_array = read_geometry(j.at("tx_array"), "tx_array");
    if (j.contains("direction_deg")) c.direction = read_direction_deg(j.at("direction_deg"), "direction_deg");
    if (j.contains("tx_direction_deg")) c.tx_direction = read_direction_deg(j.at("tx_direction_deg"), "tx_direction_deg");
    if (j.contains("model")) c.model = read_model(j.at("model"), "model");
    if (j.contains("pb")) {
        c.pb = read_sweep(j.at("pb"), "pb");
        for (double p : c.pb)
            if (!(p >= 0.0 && p <= 1.0)) config_fail("pb", "probabilities must be in [0, 1]");
    }
    if (j.contains("faults")) {
        for (double x : read_sweep(j.at("faults"), "faults")) {
            if (!std::isfinite(x) || x != std::floor(x) || x < 0) config_fail("faults", "values must be non-negative integers");
            c.faults.push_back(static_cast<Index>(x));
        }
    }
    if (j.contains("groups")) {
        const json& g = j.at("groups");
        if (!g.is_array() || g.empty()) config_fail("groups", "expected a non-empty list");
        for (std::size_t i = 0; i < g.size(); ++i) {
            const std::string gf = "groups[" + std::to_string(i) + "]";
            check_keys(g[i], gf, {"count", "rows", "cols"});
            for (const char* k : {"count", "rows", "cols"})
                if (!g[i].contains(k)) config_fail(gf + "." + k, "is required");
            c.groups.push_back({read_positive_int(g[i].at("count"), gf + ".count"),
                                read_positive_int(g[i].at("rows"), gf + ".rows"),
                                read_positive_int(g[i].at("cols"), gf + ".cols")});
        }
    }
    if (j.contains("K")) c.K = read_int_sweep(j.at("K"), "K");
    if (j.contains("measurements")) {
        const json& m = j.at("measurements");
        if (!m.is_array() || m.empty()) config_fail("measurements", "expected a non-empty list of {kr, kt}");
        for (std::size_t i = 0; i < m.size(); ++i) {
            const std::string mf = "measurements[" + std::to_string(i) + "]";
            check_keys(m[i], mf, {"kr", "kt"});
            if (!m[i].contains("kr") || !m[i].contains("kt")) config_fail(mf, "needs 'kr' and 'kt'");
            c.joint_measurements.push_back({read_positive_int(m[i].at("kr"), mf + ".kr"), read_positive_int(m[i].at("kt"), mf + ".kt")});
        }
    }
    if (j.contains("rho_db")) {
        c.rho_db = read_sweep(j.at("rho_db"), "rho_db");
        for (double r : c.rho_db)
            if (std::isnan(r) || r == -std::numeric_limits<double>::infinity()) config_fail("rho_db", "must be a number or \"inf\"");
    }
    if (j.contains("bits")) {
        c.bits = static_cast<int>(read_positive_int(j.at("bits"), "bits"));
        if (c.bits != 1 && c.bits != 2) config_fail("bits", "phase-shifter resolution must be 1 or 2");
    }
    if (j.contains("impairments")) {
        const json& im = j.at("impairments");
        c.impairments.clear();
        if (im.is_array()) {
            if (im.empty()) config_fail("impairments", "expected a non-empty list");
            for (std::size_t i = 0; i < im.size(); ++i)
                c.impairments.push_back(read_impairment(im[i], "impairments[" + std::to_string(i) + "]"));
        } else {
            c.impairments.push_back(read_impairment(im, "impairments"));
        }
    }
    if (j.contains("solver")) c.solver = read_solver(j.at("solver"), "solver");
    if (j.contains("pattern_cut")) c.pattern_cut = read_pattern_cut(j.at("pattern_cut"), "pattern_cut");
    if (j.contains("stats")) c.stats = read_stats(j.at("stats"), "stats");

    // scenario-specific requirements
    const Index n = c.array.size();
    auto need_k = [&] {
        if (c.K.empty()) config_fail("K", "is required for " + name);
    };
    switch (c.scenario) {
        case ScenarioKind::PatternCut:
            if (!j.contains("pattern_cut")) config_fail("pattern_cut", "is required for pattern_cut");
            for (std::size_t i = 0; i < c.pattern_cut.blocked.size(); ++i)
                if (c.pattern_cut.blocked[i].index >= n)
                    config_fail("pattern_cut.blocked[" + std::to_string(i) + "].index",
                                "out of range for a " + std::to_string(n) + "-element array");
            break;
        case ScenarioKind::Stats:
            if (!j.contains("stats")) config_fail("stats", "is required for stats");
            if (c.trials < 2) config_fail("trials", "stats needs at least 2 trials");
            break;
        case ScenarioKind::DiagnoseRx:
            need_k();
            if (c.pb.empty() == c.faults.empty()) config_fail("pb", "give exactly one of 'pb' or 'faults'");
            for (Index s : c.faults)
                if (s > n) config_fail("faults", "more faults than array elements");
            break;
        case ScenarioKind::DiagnoseBlock:
        case ScenarioKind::DiagnoseGroup:
            if (c.groups.empty()) config_fail("groups", "is required for " + name);
            for (std::size_t i = 0; i < c.groups.size(); ++i) {
                const GroupSpec& g = c.groups[i];
                const std::string gf = "groups[" + std::to_string(i) + "]";
                if (g.rows > c.array.ny || g.cols > c.array.nx) config_fail(gf, "group shape does not fit the array");
                if (g.count * g.rows * g.cols > n) config_fail(gf, "groups cover more elements than the array has");
            }
            if (c.scenario == ScenarioKind::DiagnoseBlock) {
                need_k();
                if (c.solver.block_h > n) config_fail("solver.block_h", "must not exceed the element count");
            } else {
                if (c.model.kind != BlockageModel::Kind::Complete)
                    config_fail("model", "diagnose_group handles complete blockages only");
                if (!c.K.empty()) config_fail("K", "diagnose_group always uses nx + ny measurements; remove 'K'");
                for (std::size_t i = 0; i < c.impairments.size(); ++i)
                    if (!c.impairments[i].impairments.none())
                        config_fail("impairments[" + std::to_string(i) + "]", "diagnose_group supports no impairments");
            }
            break;
        case ScenarioKind::DiagnoseJoint:
            if (!c.tx_array) config_fail("tx_array", "is required for diagnose_joint");
            if (c.joint_measurements.empty()) config_fail("measurements", "is required for diagnose_joint");
            if (c.pb.empty()) config_fail("pb", "is required for diagnose_joint");
            for (std::size_t i = 0; i < c.impairments.size(); ++i)
                if (!c.impairments[i].impairments.none())
                    config_fail("impairments[" + std::to_string(i) + "]", "diagnose_joint supports no impairments");
            break;
    }
    return c;
}

inline ScenarioConfig parse_config_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace arraydoctor
