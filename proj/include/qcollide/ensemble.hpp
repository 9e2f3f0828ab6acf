#pragma once

// Random-unitary ensembles and the structured scan over population
// permutations ("the octagon"), plus the descriptive statistics used by the
// command-line reports.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "correlations.hpp"
#include "dynamics.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "thermo.hpp"

namespace qcollide {

// ---------------------------------------------------------------------------
// Haar-random unitaries
// ---------------------------------------------------------------------------

// QR of a complex Ginibre matrix, with the R-diagonal phases absorbed into Q
// so the distribution is exactly Haar. Entries are drawn row-major, real
// part before imaginary part, which pins the byte-exact stream layout.
inline Matrix haar_unitary(GaussianStream& g) {
    Matrix ginibre(4, 4);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Index i = 0; i < 4; ++i) {
        for (Index j = 0; j < 4; ++j) {
            double re = g.gaussian();
            double im = g.gaussian();
            ginibre(i, j) = Complex(re, im) * inv_sqrt2;
        }
    }
    Eigen::HouseholderQR<Matrix> qr(ginibre);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR();
    for (Index k = 0; k < 4; ++k) {
        Complex d = r(k, k);
        double mag = std::abs(d);
        q.col(k) *= (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
    }
    return q;
}

// ---------------------------------------------------------------------------
// Ensemble runs
// ---------------------------------------------------------------------------

struct EnsembleOptions {
    std::uint64_t seed = 0;
    long n_samples = 0;
    int workers = 1;
    bool with_correlations = false;
};

struct EnsembleRecord {
    long index = 0;
    std::uint64_t seed = 0;                 // child seed of this sample
    std::array<double, 8> fingerprint{};    // first row of the drawn unitary
    ThermoRecord thermo;
    std::optional<CorrelationRecord> correlations;
    bool excluded = false;                  // steady-state solve failed
    std::string failure;
};

namespace detail {

inline EnsembleRecord ensemble_sample(const ModelParams& p, std::uint64_t master_seed,
                                      long k, bool with_correlations,
                                      const Matrix& collision_unitary,
                                      const Matrix& thermal_pair) {
    EnsembleRecord rec;
    rec.index = k;
    rec.seed = child_seed(master_seed, static_cast<std::uint64_t>(k));
    GaussianStream g(rec.seed);
    Matrix u = haar_unitary(g);
    for (Index j = 0; j < 4; ++j) {
        rec.fingerprint[static_cast<std::size_t>(2 * j)] = u(0, j).real();
        rec.fingerprint[static_cast<std::size_t>(2 * j + 1)] = u(0, j).imag();
    }
    Matrix bath = u * thermal_pair * u.adjoint();
    bath = Matrix(0.5 * (bath + bath.adjoint()));
    try {
        EvaluatedConfiguration cfg = evaluate_configuration(p, bath, collision_unitary);
        rec.thermo = cfg.thermo;
        if (with_correlations) rec.correlations = compute_correlations(cfg);
    } catch (const DegenerateSteadyState& e) {
        rec.excluded = true;
        rec.failure = e.what();
    } catch (const NonConvergence& e) {
        rec.excluded = true;
        rec.failure = e.what();
    }
    return rec;
}

} // namespace detail

// Evaluate n_samples Haar-random bath preparations. Sample k depends only on
// (seed, k), never on thread scheduling, so any worker count produces the
// same records in the same order.
inline std::vector<EnsembleRecord> run_ensemble(const ModelParams& p,
                                                const EnsembleOptions& opt) {
    p.validate();
    if (opt.n_samples < 0)
        throw std::invalid_argument("run_ensemble: sample count must be >= 0");
    if (opt.workers < 1)
        throw std::invalid_argument("run_ensemble: worker count must be >= 1");

    const Matrix collision_unitary = unitary_exp(total_hamiltonian(p), p.tau);
    const Matrix thermal_pair = thermal_bath_pair(p);
    std::vector<EnsembleRecord> records(static_cast<std::size_t>(opt.n_samples));

    std::atomic<long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto body = [&]() {
        try {
            for (;;) {
                long k = next.fetch_add(1, std::memory_order_relaxed);
                if (k >= opt.n_samples) break;
                records[static_cast<std::size_t>(k)] = detail::ensemble_sample(
                    p, opt.seed, k, opt.with_correlations, collision_unitary,
                    thermal_pair);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next.store(opt.n_samples);
        }
    };

    if (opt.workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(opt.workers));
        for (int w = 0; w < opt.workers; ++w) pool.emplace_back(body);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return records;
}

// ---------------------------------------------------------------------------
// Descriptive statistics
// ---------------------------------------------------------------------------

struct SampleStats {
    long n = 0;
    double mean = 0.0;
    double stddev = 0.0;   // sample standard deviation (n-1)
    double skewness = 0.0; // m3 / m2^(3/2), population moments
    double min = 0.0;
    double max = 0.0;
};

inline SampleStats compute_stats(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("compute_stats: empty sample");
    SampleStats s;
    s.n = static_cast<long>(xs.size());
    double sum = 0.0;
    s.min = xs.front();
    s.max = xs.front();
    for (double x : xs) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(s.n);
    double m2 = 0.0, m3 = 0.0;
    for (double x : xs) {
        double d = x - s.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    double n = static_cast<double>(s.n);
    s.stddev = (s.n > 1) ? std::sqrt(m2 / (n - 1.0)) : 0.0;
    m2 /= n;
    m3 /= n;
    s.skewness = (m2 > 0.0) ? m3 / std::pow(m2, 1.5) : 0.0;
    return s;
}

struct Histogram1D {
    double lo = 0.0, hi = 0.0;
    int bins = 0;
    std::vector<long> counts;
    long underflow = 0, overflow = 0;
};

inline Histogram1D histogram1d(const std::vector<double>& xs, double lo, double hi,
                               int bins) {
    if (!(hi > lo) || bins < 1) throw std::invalid_argument("histogram1d: bad range");
    Histogram1D h;
    h.lo = lo;
    h.hi = hi;
    h.bins = bins;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double x : xs) {
        if (x < lo) {
            ++h.underflow;
        } else if (x > hi) {
            ++h.overflow;
        } else {
            int b = std::min(bins - 1, static_cast<int>((x - lo) / (hi - lo) *
                                                        static_cast<double>(bins)));
            ++h.counts[static_cast<std::size_t>(b)];
        }
    }
    return h;
}

struct Histogram2D {
    double xlo = 0.0, xhi = 0.0, ylo = 0.0, yhi = 0.0;
    int xbins = 0, ybins = 0;
    std::vector<long> counts; // row-major: counts[iy * xbins + ix]
    long outside = 0;
};

inline Histogram2D histogram2d(const std::vector<double>& xs, const std::vector<double>& ys,
                               double xlo, double xhi, int xbins, double ylo, double yhi,
                               int ybins) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("histogram2d: length mismatch");
    if (!(xhi > xlo) || !(yhi > ylo) || xbins < 1 || ybins < 1)
        throw std::invalid_argument("histogram2d: bad range");
    Histogram2D h;
    h.xlo = xlo;
    h.xhi = xhi;
    h.ylo = ylo;
    h.yhi = yhi;
    h.xbins = xbins;
    h.ybins = ybins;
    h.counts.assign(static_cast<std::size_t>(xbins) * static_cast<std::size_t>(ybins), 0);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        double x = xs[k], y = ys[k];
        if (x < xlo || x > xhi || y < ylo || y > yhi) {
            ++h.outside;
            continue;
        }
        int ix = std::min(xbins - 1, static_cast<int>((x - xlo) / (xhi - xlo) *
                                                      static_cast<double>(xbins)));
        int iy = std::min(ybins - 1, static_cast<int>((y - ylo) / (yhi - ylo) *
                                                      static_cast<double>(ybins)));
        ++h.counts[static_cast<std::size_t>(iy) * static_cast<std::size_t>(h.xbins) +
                   static_cast<std::size_t>(ix)];
    }
    return h;
}

// ---------------------------------------------------------------------------
// Convex geometry in the (Q2_complete, W_complete) plane
// ---------------------------------------------------------------------------

namespace detail {

inline double cross2(double ox, double oy, double ax, double ay, double bx, double by) {
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

} // namespace detail

// Andrew's monotone chain; returns counterclockwise hull vertex indices.
// Collinear boundary points are dropped (strict hull).
inline std::vector<std::size_t> convex_hull_indices(const std::vector<double>& xs,
                                                    const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("convex_hull_indices: length mismatch");
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (xs[a] != xs[b]) return xs[a] < xs[b];
        return ys[a] < ys[b];
    });
    if (n < 3) return order;

    std::vector<std::size_t> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t idx : order) { // lower hull
        while (k >= 2 && detail::cross2(xs[hull[k - 2]], ys[hull[k - 2]], xs[hull[k - 1]],
                                        ys[hull[k - 1]], xs[idx], ys[idx]) <= 0.0)
            --k;
        hull[k++] = idx;
    }
    std::size_t lower = k + 1;
    for (std::size_t m = order.size(); m-- > 0;) { // upper hull
        std::size_t idx = order[m];
        while (k >= lower && detail::cross2(xs[hull[k - 2]], ys[hull[k - 2]], xs[hull[k - 1]],
                                            ys[hull[k - 1]], xs[idx], ys[idx]) <= 0.0)
            --k;
        hull[k++] = idx;
    }
    hull.resize(k - 1); // last point repeats the first
    return hull;
}

// Greatest outward normal distance from (px, py) to any hull edge line:
// positive when the point lies outside the (counterclockwise) hull, negative
// when strictly inside, with magnitude the margin to the nearest edge line.
inline double signed_distance_to_hull(const std::vector<double>& hx,
                                      const std::vector<double>& hy, double px,
                                      double py) {
    if (hx.size() != hy.size() || hx.size() < 3)
        throw std::invalid_argument("signed_distance_to_hull: need >= 3 vertices");
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < hx.size(); ++a) {
        std::size_t b = (a + 1) % hx.size();
        double ex = hx[b] - hx[a], ey = hy[b] - hy[a];
        double len = std::hypot(ex, ey);
        if (len == 0.0) continue;
        double cross = ex * (py - hy[a]) - ey * (px - hx[a]);
        worst = std::max(worst, -cross / len);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// The octagon: population permutations of the thermal pair
// ---------------------------------------------------------------------------

// A population permutation sigma acts as new_diag[i] = old_diag[sigma[i]].
inline std::string permutation_pattern(const std::array<int, 4>& sigma) {
    std::string s;
    for (int v : sigma) s += static_cast<char>('1' + v);
    return s;
}

// Measure which population permutation a basis-permuting unitary realizes.
// Throws if some column is not concentrated on a single basis state.
inline std::array<int, 4> measured_permutation(const Matrix& u) {
    std::array<int, 4> sigma{};
    for (Index j = 0; j < 4; ++j) {
        Index arg = 0;
        double best = 0.0;
        for (Index i = 0; i < 4; ++i) {
            double a = std::abs(u(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (best < 1.0 - 1e-9)
            throw std::invalid_argument(
                "measured_permutation: unitary does not permute basis states");
        sigma[static_cast<std::size_t>(arg)] = static_cast<int>(j);
    }
    return sigma;
}

struct OctagonPoint {
    std::string label;              // "I".."VIII", or the pattern for bare permutations
    std::array<int, 4> permutation{};
    ThermoRecord thermo;
    double spectral_gap = 0.0;

    double x() const { return thermo.Q2_complete; }
    double y() const { return thermo.W_complete; }
};

struct OctagonAnalysis {
    std::vector<OctagonPoint> labeled;       // the 8 named operations, evaluated
    std::vector<OctagonPoint> permutations;  // all 24 population permutations
    std::vector<std::size_t> hull;           // CCW indices into permutations
    std::vector<int> labeled_to_permutation; // matching by measured permutation
    OttoReference otto{};
};

inline OctagonAnalysis octagon_analysis(const ModelParams& p) {
    p.validate();
    const Matrix collision_unitary = unitary_exp(total_hamiltonian(p), p.tau);
    const Matrix thermal_pair = thermal_bath_pair(p);
    std::array<double, 4> old_diag{};
    for (Index i = 0; i < 4; ++i) old_diag[static_cast<std::size_t>(i)] =
        thermal_pair(i, i).real();

    OctagonAnalysis out;
    out.otto = otto_reference(p);

    std::array<int, 4> sigma = {0, 1, 2, 3};
    do {
        Matrix bath = Matrix::Zero(4, 4);
        for (Index i = 0; i < 4; ++i)
            bath(i, i) = old_diag[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])];
        EvaluatedConfiguration cfg = evaluate_configuration(p, bath, collision_unitary);
        OctagonPoint pt;
        pt.label = permutation_pattern(sigma);
        pt.permutation = sigma;
        pt.thermo = cfg.thermo;
        pt.spectral_gap = cfg.spectral_gap;
        out.permutations.push_back(std::move(pt));
    } while (std::next_permutation(sigma.begin(), sigma.end()));

    for (NoncorrOp op : all_noncorr_ops()) {
        Matrix u = noncorrelating_unitary(op);
        Matrix bath = u * thermal_pair * u.adjoint();
        bath = Matrix(0.5 * (bath + bath.adjoint()));
        EvaluatedConfiguration cfg = evaluate_configuration(p, bath, collision_unitary);
        OctagonPoint pt;
        pt.label = to_string(op);
        pt.permutation = measured_permutation(u);
        pt.thermo = cfg.thermo;
        pt.spectral_gap = cfg.spectral_gap;
        out.labeled.push_back(std::move(pt));
    }

    std::vector<double> xs, ys;
    xs.reserve(out.permutations.size());
    ys.reserve(out.permutations.size());
    for (const OctagonPoint& pt : out.permutations) {
        xs.push_back(pt.x());
        ys.push_back(pt.y());
    }
    out.hull = convex_hull_indices(xs, ys);

    for (const OctagonPoint& lab : out.labeled) {
        int match = -1;
        for (std::size_t k = 0; k < out.permutations.size(); ++k) {
            if (out.permutations[k].permutation == lab.permutation) {
                match = static_cast<int>(k);
                break;
            }
        }
        out.labeled_to_permutation.push_back(match);
    }
    return out;
}

struct PartialExtremes {
    double w_min = 0.0, w_max = 0.0;
    std::string argmin_label, argmax_label;
};

// Extremes of the switching work over all population permutations; the label
// reports the named operation realizing the extremum when one does.
inline PartialExtremes partial_extremes(const OctagonAnalysis& oct) {
    if (oct.permutations.empty())
        throw std::invalid_argument("partial_extremes: empty analysis");
    PartialExtremes out;
    std::size_t imin = 0, imax = 0;
    for (std::size_t k = 0; k < oct.permutations.size(); ++k) {
        double w = oct.permutations[k].thermo.W_partial;
        if (w < oct.permutations[imin].thermo.W_partial) imin = k;
        if (w > oct.permutations[imax].thermo.W_partial) imax = k;
    }
    out.w_min = oct.permutations[imin].thermo.W_partial;
    out.w_max = oct.permutations[imax].thermo.W_partial;
    auto label_of = [&](std::size_t perm_index) -> std::string {
        for (std::size_t l = 0; l < oct.labeled.size(); ++l)
            if (oct.labeled_to_permutation[l] == static_cast<int>(perm_index))
                return oct.labeled[l].label;
        return oct.permutations[perm_index].label;
    };
    out.argmin_label = label_of(imin);
    out.argmax_label = label_of(imax);
    return out;
}

// ---------------------------------------------------------------------------
// Field-scaling linearity of the named operating points
// ---------------------------------------------------------------------------

// Scan the second local field over b2_values for each named operation and
// fit Q2_complete affinely in B2. Reports the per-vertex coefficients of
// determination and a pooled one (per-vertex fits, residuals summed over all
// points against the global spread).
struct LinearityCheck {
    std::vector<double> b2_values;
    std::array<std::array<double, 2>, 8> fit_slope_intercept{}; // per named operation
    std::array<double, 8> per_vertex_r2{};
    double pooled_r2 = 0.0;
    std::vector<std::vector<ThermoRecord>> records; // [vertex][b2 index]
};

inline LinearityCheck field_linearity_check(ModelParams base,
                                            const std::vector<double>& b2_values) {
    if (b2_values.size() < 2)
        throw std::invalid_argument("field_linearity_check: need >= 2 field values");
    LinearityCheck out;
    out.b2_values = b2_values;
    out.records.resize(8);

    std::vector<std::vector<double>> ys(8);
    for (std::size_t vi = 0; vi < 8; ++vi) {
        NoncorrOp op = all_noncorr_ops()[vi];
        for (double b2 : b2_values) {
            ModelParams p = base;
            p.B2 = b2;
            Matrix u = noncorrelating_unitary(op);
            Matrix bath = u * thermal_bath_pair(p) * u.adjoint();
            bath = Matrix(0.5 * (bath + bath.adjoint()));
            EvaluatedConfiguration cfg = evaluate_configuration(p, bath);
            out.records[vi].push_back(cfg.thermo);
            ys[vi].push_back(cfg.thermo.Q2_complete);
        }
    }

    double global_sum = 0.0;
    long global_n = 0;
    for (const auto& col : ys)
        for (double y : col) {
            global_sum += y;
            ++global_n;
        }
    double global_mean = global_sum / static_cast<double>(global_n);

    double pooled_res = 0.0, pooled_tot = 0.0;
    for (std::size_t vi = 0; vi < 8; ++vi) {
        const std::vector<double>& y = ys[vi];
        const std::vector<double>& x = b2_values;
        double n = static_cast<double>(x.size());
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            sx += x[k];
            sy += y[k];
            sxx += x[k] * x[k];
            sxy += x[k] * y[k];
        }
        double denom = n * sxx - sx * sx;
        double slope = (n * sxy - sx * sy) / denom;
        double intercept = (sy - slope * sx) / n;
        out.fit_slope_intercept[vi] = {slope, intercept};

        double mean_y = sy / n;
        double ss_res = 0.0, ss_tot = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            double r = y[k] - (slope * x[k] + intercept);
            ss_res += r * r;
            double d = y[k] - mean_y;
            ss_tot += d * d;
            double dg = y[k] - global_mean;
            pooled_tot += dg * dg;
        }
        pooled_res += ss_res;
        out.per_vertex_r2[vi] = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    }
    out.pooled_r2 = (pooled_tot > 0.0) ? 1.0 - pooled_res / pooled_tot : 1.0;
    return out;
}

// Mode tallies over an ensemble, one scenario at a time.
struct ModeCounts {
    long engine = 0, refrigerator = 0, accelerator = 0, heater = 0, degenerate = 0;
    long excluded = 0;
};

inline ModeCounts count_modes(const std::vector<EnsembleRecord>& records, Scenario s) {
    ModeCounts out;
    for (const EnsembleRecord& r : records) {
        if (r.excluded) {
            ++out.excluded;
            continue;
        }
        switch (r.thermo.mode(s)) {
            case Mode::Engine:       ++out.engine; break;
            case Mode::Refrigerator: ++out.refrigerator; break;
            case Mode::Accelerator:  ++out.accelerator; break;
            case Mode::Heater:       ++out.heater; break;
            case Mode::Degenerate:   ++out.degenerate; break;
        }
    }
    return out;
}

} // namespace qcollide
