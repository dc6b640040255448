#pragma once

#include <arraydoctor/block_recovery.hpp>
#include <arraydoctor/config.hpp>
#include <arraydoctor/group_complete.hpp>
#include <arraydoctor/joint_diagnosis.hpp>
#include <arraydoctor/parallel.hpp>
#include <arraydoctor/pattern_stats.hpp>
#include <arraydoctor/recovery.hpp>

#include <cstdio>
#include <ostream>

namespace arraydoctor {

/// CSV-ready table. Every cell is already formatted.
struct ResultTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw InvalidArgument("result table has no column '" + name + "'");
    }

    /// Cell as a number; "inf", "-inf" and "nan" round-trip.
    double number(std::size_t row, const std::string& name) const {
        return std::stod(rows.at(row).at(column(name)));
    }

    void write_csv(std::ostream& out) const {
        auto line = [&out](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
            out << '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
    }

    std::string to_csv() const {
        std::ostringstream ss;
        write_csv(ss);
        return ss.str();
    }
};

/// Fixed-precision formatting so identical runs give identical bytes.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

inline std::string format_number(Index x) { return std::to_string(x); }

// Seed layout: trial t of sweep point p draws its ground truth from
// stream(stream_seed(seed, 0), t) and its measurements and noise from
// stream(stream_seed(seed, 1 + p), t). Ground truth is therefore shared
// across points that differ only in K, rho or the impairment.
inline Rng truth_stream(std::uint64_t seed, Index trial) {
    return stream(stream_seed(seed, 0), static_cast<std::uint64_t>(trial));
}

inline Rng measurement_stream(std::uint64_t seed, std::size_t point, Index trial) {
    return stream(stream_seed(seed, 1 + point), static_cast<std::uint64_t>(trial));
}

namespace detail {

inline unsigned resolve_threads(const ScenarioConfig& c) {
    return c.threads == 0 ? default_thread_count() : c.threads;
}

inline std::string format_rho_db(double db) { return format_number(db); }

/// NMSE values in linear units, aggregated as median and mean in dB. The
/// stderr is the delta-method standard error of the mean in dB.
struct NmseColumns {
    double median_db = std::numeric_limits<double>::quiet_NaN();
    double mean_db = std::numeric_limits<double>::quiet_NaN();
    double stderr_db = std::numeric_limits<double>::quiet_NaN();
};

inline NmseColumns nmse_columns(const std::vector<double>& linear) {
    NmseColumns c;
    if (linear.empty()) return c;
    const Summary s = summarize(linear);
    c.median_db = linear_to_db(s.median);
    c.mean_db = linear_to_db(s.mean);
    c.stderr_db = s.mean > 0.0 ? 10.0 / std::log(10.0) * s.stderr_mean / s.mean : 0.0;
    return c;
}

/// NMSE of an estimate, or 1 (v_hat = 0) when the trial failed.
inline std::optional<double> scored_nmse(const CVector& truth, const std::optional<CVector>& estimate) {
    if (truth.squaredNorm() == 0.0) return std::nullopt;
    if (!estimate) return 1.0;
    return nmse(truth, *estimate);
}

struct TrialRecord {
    std::optional<double> nmse;
    bool exact = false;
    bool no_misses = false;
    bool failed = false;
};

struct PairRecord {
    TrialRecord main;
    TrialRecord alt;  // genie or comparison method
};

inline TrialRecord score(const CVector& truth, const IndexSet& true_support, const std::optional<CVector>& estimate,
                         const IndexSet& est_support) {
    TrialRecord r;
    r.nmse = scored_nmse(truth, estimate);
    r.failed = !estimate;
    if (estimate) {
        const SupportComparison s = compare_support(true_support, est_support);
        r.exact = s.exact;
        r.no_misses = s.no_misses();
    }
    return r;
}

// ---------------------------------------------------------------------------

inline ResultTable run_pattern_cut(const ScenarioConfig& c) {
    ResultTable t;
    t.header = {"scenario", "phi_deg", "ideal_re", "ideal_im", "ideal_db", "blocked_re", "blocked_im", "blocked_db",
                "failures"};
    const ArrayGeometry& g = c.array;
    const double n = static_cast<double>(g.size());
    const WeightVector w = steering_vector(g, c.pattern_cut.steer).conjugate() / n;
    CVector b = CVector::Ones(g.size());
    for (const BlockedElement& e : c.pattern_cut.blocked) b[e.index] = e.b;
    for (double phi : c.pattern_cut.phi) {
        const SteeringVector a = steering_vector(g, Direction{c.pattern_cut.theta, phi});
        const cplx ideal = pattern(w, a);
        const cplx blocked = pattern(w, a, b);
        t.rows.push_back({"pattern_cut", format_number(rad_to_deg(phi)), format_number(ideal.real()),
                          format_number(ideal.imag()), format_number(20.0 * std::log10(std::abs(ideal))),
                          format_number(blocked.real()), format_number(blocked.imag()),
                          format_number(20.0 * std::log10(std::abs(blocked))), "0"});
    }
    return t;
}

/// Table rows: phi == phi_t gives the mainlobe entry, anything else the
/// sidelobe entry. Mainlobe variance is the per-element coefficient spread at a
/// fixed blocked set; sidelobe variance is the plain pattern variance.
inline ResultTable run_stats(const ScenarioConfig& c) {
    ResultTable t;
    t.header = {"model", "pb", "nx", "phi", "phi_t", "mean_re", "mean_im", "var_closed", "var_mc", "stderr"};
    const StatsSpec& s = c.stats;
    struct Job {
        BlockageModel model;
        double pb;
        Index nx;
        double phi;
    };
    std::vector<Job> jobs;
    for (const BlockageModel& m : s.models)
        for (double pb : s.pb)
            for (Index nx : s.nx)
                for (double phi : s.phi) jobs.push_back({m, pb, nx, phi});

    std::vector<std::vector<std::string>> rows(jobs.size());
    parallel_for(jobs.size(), resolve_threads(c), [&](std::size_t i) {
        const Job& j = jobs[i];
        const bool mainlobe = std::abs(j.phi - s.phi_t) < 1e-12;
        const ArrayGeometry geom{j.nx, 1, s.dx_norm, 0.5};
        const MeanVar closed =
            mainlobe ? mainlobe_stats(j.pb, j.model) : sidelobe_stats(j.pb, j.model, j.nx, s.dx_norm, j.phi, s.phi_t);
        const EmpiricalStats mc = empirical_pattern_stats(geom, j.pb, j.model, j.phi, s.phi_t, c.trials,
                                                          stream_seed(c.seed, i),
                                                          mainlobe ? Spread::IntensityPerElement : Spread::Total);
        std::string model = to_string(j.model.kind);
        if (j.model.kind == BlockageModel::Kind::ConstantPartial)
            model += "(" + format_number(j.model.beta.real()) + ";" + format_number(j.model.beta.imag()) + ")";
        rows[i] = {model,
                   format_number(j.pb),
                   format_number(j.nx),
                   format_number(rad_to_deg(j.phi)),
                   format_number(rad_to_deg(s.phi_t)),
                   format_number(mc.mean.real()),
                   format_number(mc.mean.imag()),
                   format_number(closed.variance),
                   format_number(mc.variance),
                   format_number(mc.stderr_variance)};
    });
    t.rows = std::move(rows);
    return t;
}

// ---------------------------------------------------------------------------

inline LassoConfig lasso_config(const SolverSpec& s, Index n, double rho) {
    LassoConfig l = LassoConfig::defaults(n, rho, s.sigma_floor);
    if (s.omega) l.omega = *s.omega;
    l.max_iters = s.max_iters;
    l.rel_tol = s.rel_tol;
    return l;
}

inline BlockConfig block_config(const SolverSpec& s, Index n, double rho) {
    BlockConfig b = BlockConfig::defaults(n, rho, s.block_h, s.sigma_floor);
    const double omega = s.omega ? *s.omega : default_omega(n);
    b.lambda_g = s.lambda_g ? *s.lambda_g : omega * effective_sigma(rho, s.sigma_floor) * std::sqrt(static_cast<double>(b.h));
    b.max_iters = s.max_iters;
    b.rel_tol = s.rel_tol;
    return b;
}

inline ResultTable run_rx(const ScenarioConfig& c) {
    ResultTable t;
    t.header = {"scenario",        "impairment",      "pb",      "faults",          "rho_db",
                "K",               "trials",          "nmse_median_db", "nmse_mean_db", "genie_median_db",
                "genie_mean_db",   "success",         "success_lenient", "nmse_stderr_db", "genie_stderr_db",
                "success_stderr",  "failures"};
    const ArrayGeometry& g = c.array;
    const Index n = g.size();
    const SteeringVector a = steering_vector(g, c.direction);
    const bool by_pb = !c.pb.empty();
    const std::size_t levels = by_pb ? c.pb.size() : c.faults.size();
    const unsigned threads = resolve_threads(c);

    std::size_t point = 0;
    for (const ImpairmentVariant& imp : c.impairments) {
        for (std::size_t li = 0; li < levels; ++li) {
            for (double rho_db : c.rho_db) {
                const double rho = db_to_linear(rho_db);
                const LassoConfig cfg = lasso_config(c.solver, n, rho);
                for (Index K : c.K) {
                    std::vector<PairRecord> recs(static_cast<std::size_t>(c.trials));
                    parallel_for(recs.size(), threads, [&](std::size_t ti) {
                        const Index trial = static_cast<Index>(ti);
                        Rng truth = truth_stream(c.seed, trial);
                        const BlockageMap map = by_pb ? sample_blockage(n, c.pb[li], c.model, truth)
                                                      : sample_blockage_fixed_count(n, c.faults[li], c.model, truth);
                        Rng meas = measurement_stream(c.seed, point, trial);
                        const CMatrix X = random_weights(K, n, c.bits, meas);
                        const MeasurementSet ms = measure_rx(g, map, X, c.direction, rho, imp.impairments, meas);
                        const CVector q = innovation_vector(map, a);

                        std::optional<CVector> est, genie;
                        IndexSet support;
                        try {
                            DiagnosisReport r = diagnose_rx(ms, a, cfg, c.solver.tau_rel, q);
                            est = std::move(r.q_hat);
                            support = std::move(r.support);
                        } catch (const Error&) {
                        }
                        try {
                            genie = diagnose_rx_genie(ms, a, map.blocked, q).q_hat;
                        } catch (const Error&) {
                        }
                        recs[ti].main = score(q, map.blocked, est, support);
                        recs[ti].alt.nmse = scored_nmse(q, genie);
                    });

                    std::vector<double> nm, gn;
                    Index exact = 0, lenient = 0, failures = 0;
                    for (const PairRecord& r : recs) {
                        if (r.main.nmse) nm.push_back(*r.main.nmse);
                        if (r.alt.nmse) gn.push_back(*r.alt.nmse);
                        exact += r.main.exact;
                        lenient += r.main.no_misses;
                        failures += r.main.failed;
                    }
                    const NmseColumns nc = nmse_columns(nm), gc = nmse_columns(gn);
                    const Proportion ps = proportion(exact, c.trials), pl = proportion(lenient, c.trials);
                    t.rows.push_back({"diagnose_rx", imp.label, by_pb ? format_number(c.pb[li]) : "",
                                      by_pb ? "" : format_number(c.faults[li]), format_rho_db(rho_db),
                                      format_number(K), format_number(c.trials), format_number(nc.median_db),
                                      format_number(nc.mean_db), format_number(gc.median_db),
                                      format_number(gc.mean_db), format_number(ps.rate), format_number(pl.rate),
                                      format_number(nc.stderr_db), format_number(gc.stderr_db),
                                      format_number(ps.stderr_rate), format_number(failures)});
                    ++point;
                }
            }
        }
    }
    return t;
}

inline ResultTable run_block(const ScenarioConfig& c) {
    ResultTable t;
    t.header = {"scenario",        "impairment",     "groups",         "rows",          "cols",
                "rho_db",          "K",              "trials",         "block_median_db", "block_mean_db",
                "lasso_median_db", "lasso_mean_db",  "gap_mean_db",    "block_success", "lasso_success",
                "block_stderr_db", "lasso_stderr_db", "gap_stderr_db", "failures"};
    const ArrayGeometry& g = c.array;
    const Index n = g.size();
    const SteeringVector a = steering_vector(g, c.direction);
    const unsigned threads = resolve_threads(c);

    std::size_t point = 0;
    for (const ImpairmentVariant& imp : c.impairments) {
        for (const GroupSpec& gs : c.groups) {
            for (double rho_db : c.rho_db) {
                const double rho = db_to_linear(rho_db);
                const LassoConfig lcfg = lasso_config(c.solver, n, rho);
                const BlockConfig bcfg = block_config(c.solver, n, rho);
                for (Index K : c.K) {
                    std::vector<PairRecord> recs(static_cast<std::size_t>(c.trials));
                    parallel_for(recs.size(), threads, [&](std::size_t ti) {
                        const Index trial = static_cast<Index>(ti);
                        Rng truth = truth_stream(c.seed, trial);
                        const BlockageMap map =
                            place_group_blockage(g, gs.count, GroupShape{gs.rows, gs.cols}, c.model, truth);
                        Rng meas = measurement_stream(c.seed, point, trial);
                        const CMatrix X = random_weights(K, n, c.bits, meas);
                        const MeasurementSet ms = measure_rx(g, map, X, c.direction, rho, imp.impairments, meas);
                        const CVector q = innovation_vector(map, a);

                        std::optional<CVector> eb, el;
                        IndexSet sb, sl;
                        try {
                            DiagnosisReport r = diagnose_block(ms, a, bcfg, c.solver.tau_rel, q);
                            eb = std::move(r.q_hat);
                            sb = std::move(r.support);
                        } catch (const Error&) {
                        }
                        try {
                            DiagnosisReport r = diagnose_rx(ms, a, lcfg, c.solver.tau_rel, q);
                            el = std::move(r.q_hat);
                            sl = std::move(r.support);
                        } catch (const Error&) {
                        }
                        recs[ti].main = score(q, map.blocked, eb, sb);
                        recs[ti].alt = score(q, map.blocked, el, sl);
                    });

                    std::vector<double> bn, ln, gap;
                    Index bs = 0, ls = 0, failures = 0;
                    for (const PairRecord& r : recs) {
                        if (r.main.nmse) bn.push_back(*r.main.nmse);
                        if (r.alt.nmse) ln.push_back(*r.alt.nmse);
                        if (r.main.nmse && r.alt.nmse)
                            gap.push_back(linear_to_db(*r.alt.nmse) - linear_to_db(*r.main.nmse));
                        bs += r.main.exact;
                        ls += r.alt.exact;
                        failures += r.main.failed;
                    }
                    const NmseColumns bc = nmse_columns(bn), lc = nmse_columns(ln);
                    const Summary gsum = summarize(gap);
                    const Proportion pb = proportion(bs, c.trials), pl = proportion(ls, c.trials);
                    t.rows.push_back({"diagnose_block", imp.label, format_number(gs.count), format_number(gs.rows),
                                      format_number(gs.cols), format_rho_db(rho_db), format_number(K),
                                      format_number(c.trials), format_number(bc.median_db), format_number(bc.mean_db),
                                      format_number(lc.median_db), format_number(lc.mean_db), format_number(gsum.mean),
                                      format_number(pb.rate), format_number(pl.rate), format_number(bc.stderr_db),
                                      format_number(lc.stderr_db), format_number(gsum.stderr_mean),
                                      format_number(failures)});
                    ++point;
                }
            }
        }
    }
    return t;
}

/// Complete group blockages with the nx + ny measurement scheme, compared
/// with the plain LASSO pipeline on the same measurements.
inline ResultTable run_group(const ScenarioConfig& c) {
    ResultTable t;
    t.header = {"scenario",       "groups",         "rows",          "cols",           "faults",
                "rho_db",         "K",              "trials",        "success",        "lasso_success",
                "nmse_median_db", "nmse_mean_db",   "lasso_median_db", "lasso_mean_db", "success_stderr",
                "lasso_success_stderr", "nmse_stderr_db", "lasso_stderr_db", "failures"};
    const ArrayGeometry& g = c.array;
    const Index n = g.size();
    const Index K = g.nx + g.ny;
    const SteeringVector a = steering_vector(g, c.direction);
    const unsigned threads = resolve_threads(c);

    std::size_t point = 0;
    for (const GroupSpec& gs : c.groups) {
        for (double rho_db : c.rho_db) {
            const double rho = db_to_linear(rho_db);
            const LassoConfig lcfg = lasso_config(c.solver, n, rho);
            const double tau_abs = c.solver.tau_abs ? *c.solver.tau_abs : default_tau_abs(rho);
            std::vector<PairRecord> recs(static_cast<std::size_t>(c.trials));
            parallel_for(recs.size(), threads, [&](std::size_t ti) {
                const Index trial = static_cast<Index>(ti);
                Rng truth = truth_stream(c.seed, trial);
                const BlockageMap map =
                    place_group_blockage(g, gs.count, GroupShape{gs.rows, gs.cols}, BlockageModel::complete(), truth);
                Rng meas = measurement_stream(c.seed, point, trial);
                const GroupSchedule sched = make_group_schedule(g, c.direction, c.solver.fixed_weights, meas, c.bits);
                const MeasurementSet ms = measure_group(g, map, sched, c.direction, rho, meas);
                const CVector q = innovation_vector(map, a);

                std::optional<CVector> eg, el;
                IndexSet sg, sl;
                try {
                    const GroupDiagnosis d = diagnose_group(ms, g, sched, c.direction, tau_abs, c.solver.refine_budget);
                    sg = d.mask.to_index_set();
                    CVector est = CVector::Zero(n);
                    for (Index i : sg) est[i] = -a[i];  // complete blockage: b = 0
                    eg = std::move(est);
                } catch (const Error&) {
                }
                try {
                    // the group scheme measures ideal minus damaged, -q
                    DiagnosisReport r = diagnose_rx(ms, a, lcfg, c.solver.tau_rel, std::nullopt,
                                                    Convention::IdealMinusDamaged);
                    el = -r.q_hat;
                    sl = std::move(r.support);
                } catch (const Error&) {
                }
                recs[ti].main = score(q, map.blocked, eg, sg);
                recs[ti].alt = score(q, map.blocked, el, sl);
            });

            std::vector<double> gn, ln;
            Index gsucc = 0, lsucc = 0, failures = 0;
            for (const PairRecord& r : recs) {
                if (r.main.nmse) gn.push_back(*r.main.nmse);
                if (r.alt.nmse) ln.push_back(*r.alt.nmse);
                gsucc += r.main.exact;
                lsucc += r.alt.exact;
                failures += r.main.failed;
            }
            const NmseColumns gc = nmse_columns(gn), lc = nmse_columns(ln);
            const Proportion pg = proportion(gsucc, c.trials), pl = proportion(lsucc, c.trials);
            t.rows.push_back({"diagnose_group", format_number(gs.count), format_number(gs.rows), format_number(gs.cols),
                              format_number(gs.count * gs.rows * gs.cols), format_rho_db(rho_db), format_number(K),
                              format_number(c.trials), format_number(pg.rate), format_number(pl.rate),
                              format_number(gc.median_db), format_number(gc.mean_db), format_number(lc.median_db),
                              format_number(lc.mean_db), format_number(pg.stderr_rate), format_number(pl.stderr_rate),
                              format_number(gc.stderr_db), format_number(lc.stderr_db), format_number(failures)});
            ++point;
        }
    }
    return t;
}

/// Genie-aided joint estimate: the structured LS with the true faulty rows
/// and columns.
inline JointReport joint_genie(const JointMeasurementSet& jms, const SteeringVector& a, const SteeringVector& a_t,
                               const BlockageMap& map_r, const BlockageMap& map_t) {
    JointReport r;
    r.faulty_r = map_r.blocked;
    r.faulty_t = map_t.blocked;
    for (Index q = 0, k = 0; q < a.size(); ++q) {
        if (k < static_cast<Index>(r.faulty_r.size()) && r.faulty_r[static_cast<std::size_t>(k)] == q)
            ++k;
        else
            r.I_r.push_back(q);
    }
    for (Index p = 0, k = 0; p < a_t.size(); ++p) {
        if (k < static_cast<Index>(r.faulty_t.size()) && r.faulty_t[static_cast<std::size_t>(k)] == p)
            ++k;
        else
            r.I_t.push_back(p);
    }
    structured_estimate(r, jms, a, a_t);
    return r;
}

inline ResultTable run_joint(const ScenarioConfig& c) {
    ResultTable t;
    t.header = {"scenario",      "pb",           "rho_db",         "kr",           "kt",
                "K",             "trials",       "rx_median_db",   "rx_mean_db",   "tx_median_db",
                "tx_mean_db",    "rx_genie_median_db", "tx_genie_median_db", "success", "rx_success",
                "tx_success",    "rx_stderr_db", "tx_stderr_db",   "success_stderr", "failures"};
    const ArrayGeometry& gr = c.array;
    const ArrayGeometry& gt = *c.tx_array;
    const Index nr = gr.size(), nt = gt.size();
    const SteeringVector a = steering_vector(gr, c.direction);
    const SteeringVector a_t = steering_vector(gt, c.tx_direction);
    const unsigned threads = resolve_threads(c);

    struct JointRecord {
        std::optional<double> rx, tx, rx_genie, tx_genie;
        bool rx_ok = false, tx_ok = false, failed = false;
    };

    std::size_t point = 0;
    for (double pb : c.pb) {
        for (double rho_db : c.rho_db) {
            const double rho = db_to_linear(rho_db);
            JointConfig cfg;
            cfg.lasso = lasso_config(c.solver, nr * nt, rho);
            cfg.tau_rel = c.solver.tau_rel;
            cfg.faulty_fraction = c.solver.faulty_fraction;
            cfg.prune_z = c.solver.prune_z;
            for (const JointPair& kp : c.joint_measurements) {
                std::vector<JointRecord> recs(static_cast<std::size_t>(c.trials));
                parallel_for(recs.size(), threads, [&](std::size_t ti) {
                    const Index trial = static_cast<Index>(ti);
                    Rng truth = truth_stream(c.seed, trial);
                    const BlockageMap mr = sample_blockage(nr, pb, c.model, truth);
                    const BlockageMap mt = sample_blockage(nt, pb, c.model, truth);
                    Rng meas = measurement_stream(c.seed, point, trial);
                    const JointMeasurementSet jms =
                        measure_joint(gr, gt, mr, mt, kp.kr, kp.kt, c.direction, c.tx_direction, rho, c.bits, meas);
                    const CVector vr = innovation_vector(mr, a), vt = innovation_vector(mt, a_t);

                    JointRecord& rec = recs[ti];
                    std::optional<CVector> qr, qt;
                    try {
                        JointReport rep = diagnose_joint(jms, a, a_t, cfg, c.solver.joint_estimator);
                        rec.rx_ok = rep.faulty_r == mr.blocked;
                        rec.tx_ok = rep.faulty_t == mt.blocked;
                        qr = std::move(rep.q_r_hat);
                        qt = std::move(rep.q_t_hat);
                    } catch (const Error&) {
                        rec.failed = true;
                    }
                    rec.rx = scored_nmse(vr, qr);
                    rec.tx = scored_nmse(vt, qt);
                    std::optional<CVector> gr_hat, gt_hat;
                    try {
                        const JointReport g = joint_genie(jms, a, a_t, mr, mt);
                        gr_hat = g.q_r_hat;
                        gt_hat = g.q_t_hat;
                    } catch (const Error&) {
                    }
                    rec.rx_genie = scored_nmse(vr, gr_hat);
                    rec.tx_genie = scored_nmse(vt, gt_hat);
                });

                std::vector<double> rn, tn, rg, tg;
                Index both = 0, rx_ok = 0, tx_ok = 0, failures = 0;
                for (const JointRecord& r : recs) {
                    if (r.rx) rn.push_back(*r.rx);
                    if (r.tx) tn.push_back(*r.tx);
                    if (r.rx_genie) rg.push_back(*r.rx_genie);
                    if (r.tx_genie) tg.push_back(*r.tx_genie);
                    both += r.rx_ok && r.tx_ok;
                    rx_ok += r.rx_ok;
                    tx_ok += r.tx_ok;
                    failures += r.failed;
                }
                const NmseColumns rc = nmse_columns(rn), tc = nmse_columns(tn);
                const NmseColumns rgc = nmse_columns(rg), tgc = nmse_columns(tg);
                const Proportion ps = proportion(both, c.trials);
                t.rows.push_back({"diagnose_joint", format_number(pb), format_rho_db(rho_db), format_number(kp.kr),
                                  format_number(kp.kt), format_number(kp.kr * kp.kt), format_number(c.trials),
                                  format_number(rc.median_db), format_number(rc.mean_db), format_number(tc.median_db),
                                  format_number(tc.mean_db), format_number(rgc.median_db),
                                  format_number(tgc.median_db), format_number(ps.rate),
                                  format_number(proportion(rx_ok, c.trials).rate),
                                  format_number(proportion(tx_ok, c.trials).rate), format_number(rc.stderr_db),
                                  format_number(tc.stderr_db), format_number(ps.stderr_rate),
                                  format_number(failures)});
                ++point;
            }
        }
    }
    return t;
}

}  // namespace detail

/// Runs every sweep point of a validated configuration. Solver errors are
/// counted per trial in the failures column and never abort the sweep.
inline ResultTable run_scenario(const ScenarioConfig& c) {
    switch (c.scenario) {
        case ScenarioKind::PatternCut: return detail::run_pattern_cut(c);
        case ScenarioKind::Stats: return detail::run_stats(c);
        case ScenarioKind::DiagnoseRx: return detail::run_rx(c);
        case ScenarioKind::DiagnoseBlock: return detail::run_block(c);
        case ScenarioKind::DiagnoseGroup: return detail::run_group(c);
        case ScenarioKind::DiagnoseJoint: return detail::run_joint(c);
    }
    throw InvalidArgument("unknown scenario");
}

}  // namespace arraydoctor
