// Command-line interface to the collision-machine library.
//
// Subcommands:
//   steady-state     one bath preparation -> steady state, thermo, correlations
//   swap-sweep       partial-swap angle scan -> per-angle thermodynamics CSV
//   lindblad-check   discrete map vs continuous generator across collision times
//   random-ensemble  Haar-random bath preparations -> records, histograms, hull
//   octagon          the eight permutation preparations across a field scan
//
// Every run creates --outdir (if needed), writes its data files there, and
// finishes with manifest.json: tool version, resolved configuration and
// settings, seed, worker count, timestamps, and SHA-256 digests of every
// output. Data files carry no timestamps, so identical inputs reproduce them
// byte for byte.
//
// Exit codes: 0 success, 2 usage error, 3 numerical failure.

#include <CLI11.hpp>

#include <qcollide/qcollide.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

using namespace qcollide;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_numerical = 3;

// ---------------------------------------------------------------------------
// Options shared by all subcommands
// ---------------------------------------------------------------------------

struct CommonOptions {
    std::string config_path;
    std::string outdir;
    std::uint64_t seed = 1;
    int workers = 1;
    std::optional<double> J, Delta, B1, B2, gamma, n1, n2, tau;
};

void add_common_options(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path,
                    "parameter file with key=value lines (keys: J, Delta, B1, B2, "
                    "gamma, n1, n2, tau; '#' starts a comment)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--outdir", o.outdir, "output directory, created if missing")
        ->required();
    cmd->add_option("--seed", o.seed, "master seed for random sampling");
    cmd->add_option("--workers", o.workers, "worker threads for ensemble commands")
        ->envname("QCOLLIDE_WORKERS")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--J", o.J, "qubit-qubit coupling (overrides config)");
    cmd->add_option("--Delta", o.Delta, "coupling anisotropy (overrides config)");
    cmd->add_option("--B1", o.B1, "local field on qubit 1 (overrides config)");
    cmd->add_option("--B2", o.B2, "local field on qubit 2 (overrides config)");
    cmd->add_option("--gamma", o.gamma, "system-bath coupling rate (overrides config)");
    cmd->add_option("--n1", o.n1, "thermal occupation of bath 1 (overrides config)");
    cmd->add_option("--n2", o.n2, "thermal occupation of bath 2 (overrides config)");
    cmd->add_option("--tau", o.tau, "collision duration (overrides config)");
}

ModelParams resolve_params(const CommonOptions& o) {
    ModelParams p;
    if (!o.config_path.empty()) p = load_config(o.config_path);
    if (o.J) p.J = *o.J;
    if (o.Delta) p.Delta = *o.Delta;
    if (o.B1) p.B1 = *o.B1;
    if (o.B2) p.B2 = *o.B2;
    if (o.gamma) p.gamma = *o.gamma;
    if (o.n1) p.n1 = *o.n1;
    if (o.n2) p.n2 = *o.n2;
    if (o.tau) p.tau = *o.tau;
    p.validate();
    return p;
}

RunManifest start_manifest(const char* command, const ModelParams& p,
                           const CommonOptions& o) {
    RunManifest m;
    m.command = command;
    m.params = p;
    m.seed = o.seed;
    m.workers = o.workers;
    m.started_at = iso8601_utc_now();
    return m;
}

fs::path prepare_outdir(const CommonOptions& o) {
    fs::path dir(o.outdir);
    fs::create_directories(dir);
    return dir;
}

void report(const char* command, const fs::path& outdir,
            const std::vector<std::string>& outputs) {
    std::cout << command << ": wrote";
    for (const std::string& f : outputs) std::cout << ' ' << f << ',';
    std::cout << " manifest.json in " << outdir.string() << "\n";
}

// ---------------------------------------------------------------------------
// Bath-preparation unitary specs: identity | swap(phi) | I..VIII | haar(seed)
// ---------------------------------------------------------------------------

Matrix parse_unitary_spec(const std::string& spec) {
    if (spec == "identity") return identity(4);
    if (std::optional<NoncorrOp> op = parse_noncorr_label(spec))
        return noncorrelating_unitary(*op);
    auto inner = [&](const char* prefix) -> std::optional<std::string> {
        const std::string pre(prefix);
        if (spec.size() > pre.size() + 1 && spec.compare(0, pre.size(), pre) == 0 &&
            spec.back() == ')')
            return spec.substr(pre.size(), spec.size() - pre.size() - 1);
        return std::nullopt;
    };
    if (std::optional<std::string> arg = inner("swap(")) {
        return partial_swap(parse_double(*arg, "unitary spec swap(...)"));
    }
    if (std::optional<std::string> arg = inner("haar(")) {
        std::uint64_t s = 0;
        const char* b = arg->data();
        const char* e = arg->data() + arg->size();
        auto res = std::from_chars(b, e, s);
        if (res.ec != std::errc() || res.ptr != e)
            throw ConfigError("unitary spec haar(...): cannot parse seed '" + *arg + "'");
        GaussianStream g(child_seed(s, 0));
        return haar_unitary(g);
    }
    throw ConfigError("unitary spec '" + spec +
                      "': expected identity, swap(phi), I..VIII, or haar(seed)");
}

Matrix exchange_matrix() {
    Matrix p = Matrix::Zero(4, 4);
    p(0, 0) = 1.0;
    p(1, 2) = 1.0;
    p(2, 1) = 1.0;
    p(3, 3) = 1.0;
    return p;
}

// ---------------------------------------------------------------------------
// JSON emitters
// ---------------------------------------------------------------------------

ordered_json matrix_json(const Matrix& m) {
    ordered_json re = ordered_json::array();
    ordered_json im = ordered_json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        ordered_json rrow = ordered_json::array();
        ordered_json irow = ordered_json::array();
        for (Index j = 0; j < m.cols(); ++j) {
            rrow.push_back(m(i, j).real());
            irow.push_back(m(i, j).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return ordered_json{{"re", std::move(re)}, {"im", std::move(im)}};
}

ordered_json thermo_json(const ThermoRecord& r) {
    return ordered_json{{"W_partial", r.W_partial},
                        {"Q1_partial", r.Q1_partial},
                        {"Q2_partial", r.Q2_partial},
                        {"W_U", r.W_U},
                        {"W_complete", r.W_complete},
                        {"Q1_complete", r.Q1_complete},
                        {"Q2_complete", r.Q2_complete},
                        {"Sigma_partial", r.Sigma_partial},
                        {"Sigma_complete", r.Sigma_complete},
                        {"mode_partial", to_string(r.mode_partial)},
                        {"mode_complete", to_string(r.mode_complete)}};
}

constexpr const char* discord_definition =
    "projective measurement on the chosen system qubit; an upper bound to the "
    "generalized-measurement discord";

ordered_json correlations_json(const CorrelationRecord& c, int measured_qubit) {
    return ordered_json{{"mi_s1s2", c.mi_s1s2},
                        {"mi_a1a2", c.mi_a1a2},
                        {"mi_as", c.mi_as},
                        {"discord_s1s2", c.discord_s1s2},
                        {"concurrence_a1a2", c.concurrence_a1a2},
                        {"measured_qubit", measured_qubit},
                        {"discord_definition", discord_definition}};
}

ordered_json stats_json(const SampleStats& s) {
    return ordered_json{{"n", s.n},           {"mean", s.mean}, {"stddev", s.stddev},
                        {"skewness", s.skewness}, {"min", s.min},   {"max", s.max}};
}

ordered_json mode_fractions_json(const ModeCounts& c, long included) {
    const double denom = included > 0 ? static_cast<double>(included) : 1.0;
    return ordered_json{{"engine", c.engine / denom},
                        {"refrigerator", c.refrigerator / denom},
                        {"accelerator", c.accelerator / denom},
                        {"heater", c.heater / denom},
                        {"degenerate", c.degenerate / denom}};
}

ordered_json otto_json(const OttoReference& o) {
    return ordered_json{{"efficiency", o.efficiency}, {"cop", o.cop}};
}

std::pair<double, double> padded_range(const std::vector<double>& v) {
    double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// steady-state
// ---------------------------------------------------------------------------

struct SteadyOptions {
    std::string unitary = "identity";
    int measured_qubit = 1;
};

int cmd_steady_state(const CommonOptions& common, const SteadyOptions& so) {
    ModelParams p = resolve_params(common);
    RunManifest man = start_manifest("steady-state", p, common);

    Matrix u = parse_unitary_spec(so.unitary);
    Matrix bath = correlated_bath_state(p, u);
    EvaluatedConfiguration cfg = evaluate_configuration(p, bath);
    CorrelationRecord cr = compute_correlations(cfg);
    if (so.measured_qubit == 2) {
        Matrix ex = exchange_matrix();
        cr.discord_s1s2 =
            quantum_discord(Matrix(ex * cfg.steady_rho * ex.adjoint())).discord;
    }

    ordered_json j;
    j["unitary"] = so.unitary;
    j["spectral_gap"] = cfg.spectral_gap;
    j["residual"] = cfg.residual;
    j["steady_state"] = matrix_json(cfg.steady_rho);
    j["bath_state"] = matrix_json(cfg.bath_state);
    j["thermo"] = thermo_json(cfg.thermo);
    j["correlations"] = correlations_json(cr, so.measured_qubit);

    fs::path outdir = prepare_outdir(common);
    {
        std::ofstream out = open_output(outdir / "steady.json");
        out << j.dump(2) << "\n";
    }
    {
        std::ofstream out = open_output(outdir / "thermo.csv");
        out << thermo_csv_header()
            << thermo_csv_row(Scenario::Partial, so.unitary, cfg.thermo)
            << thermo_csv_row(Scenario::Complete, so.unitary, cfg.thermo);
    }
    man.settings =
        ordered_json{{"unitary", so.unitary}, {"measured_qubit", so.measured_qubit}};
    man.outputs = {"steady.json", "thermo.csv"};
    write_manifest(outdir, man);
    report("steady-state", outdir, man.outputs);
    return 0;
}

// ---------------------------------------------------------------------------
// swap-sweep
// ---------------------------------------------------------------------------

struct SweepOptions {
    double phi_min = 0.0;
    double phi_max = std::acos(-1.0);
    long steps = 201;
};

int cmd_swap_sweep(const CommonOptions& common, const SweepOptions& so) {
    ModelParams p = resolve_params(common);
    if (!(so.phi_max >= so.phi_min))
        throw ConfigError("swap-sweep: --phi-max must be >= --phi-min");
    RunManifest man = start_manifest("swap-sweep", p, common);

    fs::path outdir = prepare_outdir(common);
    std::ofstream out = open_output(outdir / "sweep.csv");
    out << "phi,W_partial,Q1_partial,Q2_partial,W_U,W_complete,Q1_complete,"
           "Q2_complete,Sigma_partial,Sigma_complete,mode_partial,mode_complete,"
           "N1,N2,I_A1A2\n";
    for (long k = 0; k < so.steps; ++k) {
        const double phi =
            so.steps == 1
                ? so.phi_min
                : so.phi_min + k * (so.phi_max - so.phi_min) / double(so.steps - 1);
        Matrix bath = correlated_bath_state(p, partial_swap(phi));
        EvaluatedConfiguration cfg = evaluate_configuration(p, bath);
        const ThermoRecord& t = cfg.thermo;
        out << csv_join({format_double(phi), format_double(t.W_partial),
                         format_double(t.Q1_partial), format_double(t.Q2_partial),
                         format_double(t.W_U), format_double(t.W_complete),
                         format_double(t.Q1_complete), format_double(t.Q2_complete),
                         format_double(t.Sigma_partial), format_double(t.Sigma_complete),
                         std::string(to_string(t.mode_partial)),
                         std::string(to_string(t.mode_complete)),
                         format_double(effective_population(p, phi, 1)),
                         format_double(effective_population(p, phi, 2)),
                         format_double(mutual_information(bath, 2, 2))});
    }
    out.close();

    man.settings = ordered_json{
        {"phi_min", so.phi_min}, {"phi_max", so.phi_max}, {"steps", so.steps}};
    man.outputs = {"sweep.csv"};
    write_manifest(outdir, man);
    report("swap-sweep", outdir, man.outputs);
    return 0;
}

// ---------------------------------------------------------------------------
// lindblad-check
// ---------------------------------------------------------------------------

struct LindbladOptions {
    double phi = 0.05;
    std::vector<double> tau_list = {0.1, 0.05, 0.025};
};

int cmd_lindblad_check(const CommonOptions& common, const LindbladOptions& lo) {
    ModelParams base = resolve_params(common);
    if (lo.tau_list.empty()) throw ConfigError("lindblad-check: empty tau list");
    RunManifest man = start_manifest("lindblad-check", base, common);

    struct Row {
        double tau, distance, gap, cross_rate;
    };
    std::vector<Row> rows;
    for (double tau : lo.tau_list) {
        ModelParams p = base;
        p.tau = tau;
        p.validate();
        Matrix bath = correlated_bath_state(p, partial_swap(lo.phi));
        SteadyStateResult discrete = steady_state(build_channel(p, bath));
        LindbladGenerator gen = lindblad_generator(p, lo.phi);
        SteadyStateResult continuous = lindblad_steady_state(gen);
        rows.push_back({tau, trace_distance(discrete.rho, continuous.rho),
                        discrete.spectral_gap, gen.cross_rate});
    }

    // Does the discrete map approach the continuous generator as the
    // collision shortens? Judge on the tau-sorted sequence.
    std::vector<Row> sorted = rows;
    std::sort(sorted.begin(), sorted.end(),
              [](const Row& a, const Row& b) { return a.tau > b.tau; });
    bool decreasing = true;
    for (std::size_t k = 1; k < sorted.size(); ++k)
        decreasing = decreasing && sorted[k].distance < sorted[k - 1].distance;

    fs::path outdir = prepare_outdir(common);
    {
        std::ofstream out = open_output(outdir / "lindblad.csv");
        out << "tau,trace_distance,spectral_gap,cross_rate\n";
        for (const Row& r : rows)
            out << csv_join({format_double(r.tau), format_double(r.distance),
                             format_double(r.gap), format_double(r.cross_rate)});
    }
    {
        ordered_json j;
        j["phi"] = lo.phi;
        j["tau_list"] = lo.tau_list;
        ordered_json d = ordered_json::array();
        for (const Row& r : rows) d.push_back(r.distance);
        j["trace_distances"] = d;
        j["distance_decreases_with_tau"] = decreasing;
        std::ofstream out = open_output(outdir / "summary.json");
        out << j.dump(2) << "\n";
    }

    man.settings = ordered_json{{"phi", lo.phi}, {"tau_list", lo.tau_list}};
    man.outputs = {"lindblad.csv", "summary.json"};
    write_manifest(outdir, man);
    report("lindblad-check", outdir, man.outputs);
    return 0;
}

// ---------------------------------------------------------------------------
// random-ensemble
// ---------------------------------------------------------------------------

struct EnsembleCliOptions {
    long samples = 100000;
    bool with_correlations = false;
    long bins = 40;
};

int cmd_random_ensemble(const CommonOptions& common, const EnsembleCliOptions& eo) {
    ModelParams p = resolve_params(common);
    RunManifest man = start_manifest("random-ensemble", p, common);

    EnsembleOptions opt;
    opt.seed = common.seed;
    opt.n_samples = eo.samples;
    opt.workers = common.workers;
    opt.with_correlations = eo.with_correlations;
    std::vector<EnsembleRecord> records = run_ensemble(p, opt);

    fs::path outdir = prepare_outdir(common);

    // Per-sample records.
    {
        std::ofstream out = open_output(outdir / "records.csv");
        std::vector<std::string> head = {"index", "seed"};
        for (int k = 0; k < 8; ++k) head.push_back("fp" + std::to_string(k));
        for (const char* c : {"W_partial", "Q1_partial", "Q2_partial", "W_U",
                              "W_complete", "Q1_complete", "Q2_complete",
                              "Sigma_partial", "Sigma_complete", "mode_partial",
                              "mode_complete", "excluded"})
            head.push_back(c);
        if (eo.with_correlations)
            for (const char* c : {"mi_s1s2", "mi_a1a2", "mi_as", "discord_s1s2",
                                  "concurrence_a1a2"})
                head.push_back(c);
        out << csv_join(head);
        for (const EnsembleRecord& r : records) {
            std::vector<std::string> row = {std::to_string(r.index),
                                            std::to_string(r.seed)};
            for (double f : r.fingerprint) row.push_back(format_double(f));
            const ThermoRecord& t = r.thermo;
            for (double v : {t.W_partial, t.Q1_partial, t.Q2_partial, t.W_U,
                             t.W_complete, t.Q1_complete, t.Q2_complete,
                             t.Sigma_partial, t.Sigma_complete})
                row.push_back(format_double(v));
            row.push_back(to_string(t.mode_partial));
            row.push_back(to_string(t.mode_complete));
            row.push_back(r.excluded ? "1" : "0");
            if (eo.with_correlations) {
                const CorrelationRecord c =
                    r.correlations ? *r.correlations : CorrelationRecord{};
                for (double v : {c.mi_s1s2, c.mi_a1a2, c.mi_as, c.discord_s1s2,
                                 c.concurrence_a1a2})
                    row.push_back(format_double(v));
            }
            out << csv_join(row);
        }
    }

    long excluded = 0;
    std::vector<double> wp, wc, q2c, sigc;
    for (const EnsembleRecord& r : records) {
        if (r.excluded) {
            ++excluded;
            continue;
        }
        wp.push_back(r.thermo.W_partial);
        wc.push_back(r.thermo.W_complete);
        q2c.push_back(r.thermo.Q2_complete);
        sigc.push_back(r.thermo.Sigma_complete);
    }
    const long included = static_cast<long>(wp.size());

    man.outputs = {"records.csv"};

    if (included > 0) {
        {
            auto [lo, hi] = padded_range(wp);
            Histogram1D h = histogram1d(wp, lo, hi, eo.bins);
            std::ofstream out = open_output(outdir / "hist_W_partial.csv");
            out << "bin_lo,bin_hi,count\n";
            const double width = (h.hi - h.lo) / double(h.bins);
            for (long b = 0; b < h.bins; ++b)
                out << csv_join({format_double(h.lo + b * width),
                                 format_double(h.lo + (b + 1) * width),
                                 std::to_string(h.counts[static_cast<std::size_t>(b)])});
            man.outputs.push_back("hist_W_partial.csv");
        }
        {
            auto [xlo, xhi] = padded_range(q2c);
            auto [ylo, yhi] = padded_range(wc);
            Histogram2D h = histogram2d(q2c, wc, xlo, xhi, eo.bins, ylo, yhi, eo.bins);
            std::ofstream out = open_output(outdir / "hist_W_complete_Q2_complete.csv");
            out << "q2_lo,q2_hi,w_lo,w_hi,count\n";
            const double xw = (h.xhi - h.xlo) / double(h.xbins);
            const double yw = (h.yhi - h.ylo) / double(h.ybins);
            for (long iy = 0; iy < h.ybins; ++iy)
                for (long ix = 0; ix < h.xbins; ++ix)
                    out << csv_join(
                        {format_double(h.xlo + ix * xw), format_double(h.xlo + (ix + 1) * xw),
                         format_double(h.ylo + iy * yw), format_double(h.ylo + (iy + 1) * yw),
                         std::to_string(
                             h.counts[static_cast<std::size_t>(iy * h.xbins + ix)])});
            man.outputs.push_back("hist_W_complete_Q2_complete.csv");
        }
    }

    // Permutation-preparation hull and containment of the random samples.
    OctagonAnalysis oct = octagon_analysis(p);
    std::vector<double> hx, hy;
    for (std::size_t h : oct.hull) {
        hx.push_back(oct.permutations[h].x());
        hy.push_back(oct.permutations[h].y());
    }
    long violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const EnsembleRecord& r : records) {
        if (r.excluded) continue;
        const double d =
            signed_distance_to_hull(hx, hy, r.thermo.Q2_complete, r.thermo.W_complete);
        worst = std::max(worst, d);
        if (d > tol::containment) ++violations;
    }

    {
        ordered_json j;
        ordered_json labeled = ordered_json::array();
        for (const OctagonPoint& pt : oct.labeled)
            labeled.push_back(ordered_json{
                {"label", pt.label},
                {"pattern", permutation_pattern(pt.permutation)},
                {"Q2_complete", pt.x()},
                {"W_complete", pt.y()},
                {"W_partial", pt.thermo.W_partial},
                {"mode_partial", to_string(pt.thermo.mode_partial)},
                {"mode_complete", to_string(pt.thermo.mode_complete)},
                {"spectral_gap", pt.spectral_gap}});
        j["labeled"] = std::move(labeled);
        ordered_json hull = ordered_json::array();
        for (std::size_t h : oct.hull)
            hull.push_back(ordered_json{{"pattern", oct.permutations[h].label},
                                        {"Q2_complete", oct.permutations[h].x()},
                                        {"W_complete", oct.permutations[h].y()}});
        j["hull"] = std::move(hull);
        j["otto"] = otto_json(oct.otto);
        j["containment"] = ordered_json{{"samples", included},
                                        {"tolerance", tol::containment},
                                        {"violations", violations},
                                        {"max_signed_distance", worst}};
        std::ofstream out = open_output(outdir / "octagon.json");
        out << j.dump(2) << "\n";
        man.outputs.push_back("octagon.json");
    }

    {
        ordered_json j;
        j["samples"] = eo.samples;
        j["included"] = included;
        j["excluded"] = excluded;
        if (included > 0) {
            j["W_partial"] = stats_json(compute_stats(wp));
            j["W_complete"] = stats_json(compute_stats(wc));
            j["Q2_complete"] = stats_json(compute_stats(q2c));
            j["Sigma_complete"] = stats_json(compute_stats(sigc));
        }
        j["mode_fractions_partial"] =
            mode_fractions_json(count_modes(records, Scenario::Partial), included);
        j["mode_fractions_complete"] =
            mode_fractions_json(count_modes(records, Scenario::Complete), included);
        j["containment_violations"] = violations;
        std::ofstream out = open_output(outdir / "summary.json");
        out << j.dump(2) << "\n";
        man.outputs.push_back("summary.json");
    }

    man.settings = ordered_json{{"samples", eo.samples},
                                {"with_correlations", eo.with_correlations},
                                {"histogram_bins", eo.bins}};
    write_manifest(outdir, man);
    report("random-ensemble", outdir, man.outputs);
    return 0;
}

// ---------------------------------------------------------------------------
// octagon
// ---------------------------------------------------------------------------

struct OctagonOptions {
    std::vector<double> b2_list = {0.15, 0.3, 0.6, 0.9};
};

int cmd_octagon(const CommonOptions& common, const OctagonOptions& oo) {
    ModelParams base = resolve_params(common);
    RunManifest man = start_manifest("octagon", base, common);

    LinearityCheck lin = field_linearity_check(base, oo.b2_list);

    ordered_json fields = ordered_json::array();
    for (double b2 : oo.b2_list) {
        ModelParams p = base;
        p.B2 = b2;
        OctagonAnalysis oct = octagon_analysis(p);
        PartialExtremes ext = partial_extremes(oct);

        ordered_json labeled = ordered_json::array();
        for (std::size_t k = 0; k < oct.labeled.size(); ++k) {
            const OctagonPoint& pt = oct.labeled[k];
            Matrix u = noncorrelating_unitary(all_noncorr_ops()[k]);
            Matrix bath = Matrix(u * thermal_bath_pair(p) * u.adjoint());
            bath = Matrix(0.5 * (bath + bath.adjoint()));
            CorrelationRecord cr =
                compute_correlations(evaluate_configuration(p, bath));
            labeled.push_back(ordered_json{
                {"label", pt.label},
                {"pattern", permutation_pattern(pt.permutation)},
                {"Q2_complete", pt.x()},
                {"W_complete", pt.y()},
                {"thermo", thermo_json(pt.thermo)},
                {"spectral_gap", pt.spectral_gap},
                {"correlations", correlations_json(cr, 1)}});
        }

        ordered_json hull = ordered_json::array();
        for (std::size_t h : oct.hull)
            hull.push_back(ordered_json{{"pattern", oct.permutations[h].label},
                                        {"Q2_complete", oct.permutations[h].x()},
                                        {"W_complete", oct.permutations[h].y()}});

        fields.push_back(
            ordered_json{{"B2", b2},
                         {"otto", otto_json(oct.otto)},
                         {"labeled", std::move(labeled)},
                         {"hull", std::move(hull)},
                         {"partial_extremes",
                          ordered_json{{"w_min", ext.w_min},
                                       {"w_max", ext.w_max},
                                       {"argmin_label", ext.argmin_label},
                                       {"argmax_label", ext.argmax_label}}}});
    }

    ordered_json j;
    j["b2_values"] = oo.b2_list;
    j["fields"] = std::move(fields);
    ordered_json per_vertex = ordered_json::array();
    for (std::size_t k = 0; k < 8; ++k)
        per_vertex.push_back(
            ordered_json{{"label", to_string(all_noncorr_ops()[k])},
                         {"slope", lin.fit_slope_intercept[k][0]},
                         {"intercept", lin.fit_slope_intercept[k][1]},
                         {"r2", lin.per_vertex_r2[k]}});
    j["linearity"] = ordered_json{{"quantity", "Q2_complete vs B2"},
                                  {"per_vertex", std::move(per_vertex)},
                                  {"pooled_r2", lin.pooled_r2}};
    j["discord_definition"] = discord_definition;

    fs::path outdir = prepare_outdir(common);
    {
        std::ofstream out = open_output(outdir / "octagon.json");
        out << j.dump(2) << "\n";
    }
    man.settings = ordered_json{{"b2_list", oo.b2_list}};
    man.outputs = {"octagon.json"};
    write_manifest(outdir, man);
    report("octagon", outdir, man.outputs);
    return 0;
}

} // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    CLI::App app{
        "Steady-state physics of a two-qubit machine driven by collisions with "
        "correlated pairs of thermal flying qubits"};
    app.set_version_flag("--version", version_string);
    app.require_subcommand(1);

    CommonOptions common;

    CLI::App* steady = app.add_subcommand(
        "steady-state", "steady state, thermodynamics, and correlations for one "
                        "bath preparation");
    SteadyOptions steady_opt;
    add_common_options(steady, common);
    steady->add_option("--unitary", steady_opt.unitary,
                       "bath preparation: identity, swap(phi), I..VIII, or haar(seed)");
    steady->add_option("--measured-qubit", steady_opt.measured_qubit,
                       "system qubit projectively measured for the discord value")
        ->check(CLI::Range(1, 2));

    CLI::App* sweep = app.add_subcommand(
        "swap-sweep", "scan the partial-swap angle and tabulate the thermodynamics");
    SweepOptions sweep_opt;
    add_common_options(sweep, common);
    sweep->add_option("--phi-min", sweep_opt.phi_min, "first swap angle");
    sweep->add_option("--phi-max", sweep_opt.phi_max, "last swap angle");
    sweep->add_option("--steps", sweep_opt.steps, "number of grid points")
        ->check(CLI::Range(1L, 1000000L));

    CLI::App* lind = app.add_subcommand(
        "lindblad-check",
        "compare the discrete collision map with the continuous-time generator");
    LindbladOptions lind_opt;
    add_common_options(lind, common);
    lind->add_option("--phi", lind_opt.phi, "swap angle of the bath preparation");
    lind->add_option("--tau-list", lind_opt.tau_list, "collision durations to test")
        ->check(CLI::PositiveNumber);

    CLI::App* ens = app.add_subcommand(
        "random-ensemble",
        "Haar-random bath preparations: records, histograms, hull containment");
    EnsembleCliOptions ens_opt;
    add_common_options(ens, common);
    ens->add_option("--samples", ens_opt.samples, "number of random preparations")
        ->check(CLI::NonNegativeNumber);
    ens->add_flag("--with-correlations", ens_opt.with_correlations,
                  "also compute correlation measures per sample (slow)");
    ens->add_option("--bins", ens_opt.bins, "histogram bins per axis")
        ->check(CLI::Range(1L, 10000L));

    CLI::App* oct = app.add_subcommand(
        "octagon",
        "the eight permutation preparations across a scan of the second field");
    OctagonOptions oct_opt;
    add_common_options(oct, common);
    oct->add_option("--b2-list", oct_opt.b2_list,
                    "values of B2 to scan (at least two)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (steady->parsed()) return cmd_steady_state(common, steady_opt);
        if (sweep->parsed()) return cmd_swap_sweep(common, sweep_opt);
        if (lind->parsed()) return cmd_lindblad_check(common, lind_opt);
        if (ens->parsed()) return cmd_random_ensemble(common, ens_opt);
        if (oct->parsed()) return cmd_octagon(common, oct_opt);
        std::cerr << "error: no subcommand selected\n";
        return exit_usage;
    } catch (const DegenerateSteadyState& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const NonConvergence& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
