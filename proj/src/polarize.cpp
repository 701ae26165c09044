#include "qpolar/polarize.hpp"

#include "qpolar/encoding.hpp"
#include "qpolar/report.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace qpc {

CqChannel combine_minus(const CqChannel& w, const Tolerances& tol) {
    const Matrix& r0 = w.rho0.matrix();
    const Matrix& r1 = w.rho1.matrix();
    Matrix m0 = 0.5 * (tensor(r0, r0, tol) + tensor(r1, r1, tol));
    Matrix m1 = 0.5 * (tensor(r1, r0, tol) + tensor(r0, r1, tol));
    return CqChannel(DensityOperator(std::move(m0), DensityOperator::Trust::Trusted, tol),
                     DensityOperator(std::move(m1), DensityOperator::Trust::Trusted, tol));
}

CqChannel combine_plus(const CqChannel& w, const Tolerances& tol) {
    const Matrix& r0 = w.rho0.matrix();
    const Matrix& r1 = w.rho1.matrix();
    const std::int64_t d2 = w.dim() * w.dim();
    auto embed = [&](const Matrix& a, const Matrix& b) {
        // |0><0| (x) a  +  |1><1| (x) b
        Matrix out = Matrix::Zero(2 * d2, 2 * d2);
        out.topLeftCorner(d2, d2) = a;
        out.bottomRightCorner(d2, d2) = b;
        return out;
    };
    Matrix p0 = embed(0.5 * tensor(r0, r0, tol), 0.5 * tensor(r1, r0, tol));
    Matrix p1 = embed(0.5 * tensor(r1, r1, tol), 0.5 * tensor(r0, r1, tol));
    return CqChannel(DensityOperator(std::move(p0), DensityOperator::Trust::Trusted, tol),
                     DensityOperator(std::move(p1), DensityOperator::Trust::Trusted, tol));
}

namespace {

std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t out = 1;
    while (exp-- > 0) out *= base;
    return out;
}

}  // namespace

SynthesizedChannel synthesize(const CqChannel& w, int n, int index, const Tolerances& tol) {
    if (n < 0 || n > 20) throw DimensionError("synthesize: level out of range");
    const std::int64_t big_n = std::int64_t(1) << n;
    if (index < 1 || index > big_n) throw DimensionError("synthesize: index out of range");

    const std::int64_t db = w.dim();
    const std::int64_t cdim = std::int64_t(1) << (index - 1);
    const std::int64_t qdim = ipow(db, static_cast<int>(big_n));
    const std::int64_t total = cdim * qdim;
    if (total > tol.dim_cap)
        throw ResourceError("synthesize: dimension " + std::to_string(total) + " exceeds cap");

    const Matrix* rho[2] = {&w.rho0.matrix(), &w.rho1.matrix()};
    const double weight = std::ldexp(1.0, -(static_cast<int>(big_n) - 1));

    Matrix out[2] = {Matrix::Zero(total, total), Matrix::Zero(total, total)};
    BitVec u(big_n);
    const std::int64_t n_suffix = std::int64_t(1) << (big_n - index);
    for (int ui = 0; ui < 2; ++ui) {
        for (std::int64_t prefix = 0; prefix < cdim; ++prefix) {
            Matrix block = Matrix::Zero(qdim, qdim);
            for (std::int64_t suffix = 0; suffix < n_suffix; ++suffix) {
                for (int k = 0; k < index - 1; ++k)
                    u[k] = (prefix >> (index - 2 - k)) & 1;  // u_1 = MSB of prefix
                u[index - 1] = ui;
                for (std::int64_t k = 0; k < big_n - index; ++k)
                    u[index + k] = (suffix >> (big_n - index - 1 - k)) & 1;
                const BitVec x = polar_encode(u);
                Matrix term = *rho[x[0]];
                for (std::int64_t j = 1; j < big_n; ++j) term = tensor(term, *rho[x[j]], tol);
                block += term;
            }
            out[ui].block(prefix * qdim, prefix * qdim, qdim, qdim) = weight * block;
        }
    }
    return SynthesizedChannel{
        n, index, cdim,
        CqChannel(DensityOperator(std::move(out[0]), DensityOperator::Trust::Trusted, tol),
                  DensityOperator(std::move(out[1]), DensityOperator::Trust::Trusted, tol))};
}

namespace {

/// Basis permutation sending the recursion layout to the fixed convention
/// (classical registers first, pairwise relabeled u_{2k-1} = s_k ^ t_k,
/// u_{2k} = t_k). `has_new` marks the plus case with its fresh front register.
/// Layouts: minus (s, b1, t, b2) -> (u, b1, b2);
///          plus (w, s, b1, t, b2) -> (u..., w as last classical bit, b1, b2).
Matrix remap_pair(const Matrix& m, std::int64_t cdim, std::int64_t qdim, bool has_new) {
    const std::int64_t newdim = has_new ? 2 : 1;
    const std::int64_t total = newdim * cdim * qdim * cdim * qdim;
    if (m.rows() != total) throw DimensionError("remap_pair: size mismatch");

    int cbits = 0;
    while ((std::int64_t(1) << cbits) < cdim) ++cbits;

    std::vector<std::int64_t> map(total);
    for (std::int64_t idx = 0; idx < total; ++idx) {
        std::int64_t rem = idx;
        const std::int64_t b2 = rem % qdim;
        rem /= qdim;
        const std::int64_t t = rem % cdim;
        rem /= cdim;
        const std::int64_t b1 = rem % qdim;
        rem /= qdim;
        const std::int64_t s = rem % cdim;
        rem /= cdim;
        const std::int64_t w = has_new ? rem : 0;

        std::int64_t u = 0;
        for (int k = 0; k < cbits; ++k) {
            const std::int64_t sk = (s >> (cbits - 1 - k)) & 1;
            const std::int64_t tk = (t >> (cbits - 1 - k)) & 1;
            u = (u << 2) | ((sk ^ tk) << 1) | tk;
        }
        if (has_new) u = (u << 1) | w;

        map[idx] = (u * qdim + b1) * qdim + b2;
    }

    Matrix out(total, total);
    for (std::int64_t r = 0; r < total; ++r)
        for (std::int64_t c = 0; c < total; ++c) out(map[r], map[c]) = m(r, c);
    return out;
}

}  // namespace

SynthesizedChannel synthesize_recursive(const CqChannel& w, int n, int index,
                                        const Tolerances& tol) {
    if (n < 0) throw DimensionError("synthesize_recursive: negative level");
    const std::int64_t big_n = std::int64_t(1) << n;
    if (index < 1 || index > big_n) throw DimensionError("synthesize_recursive: index out of range");
    if (n == 0) return SynthesizedChannel{0, 1, 1, w};

    const int inner_index = (index + 1) / 2;
    const bool outer_plus = (index % 2 == 0);
    SynthesizedChannel inner = synthesize_recursive(w, n - 1, inner_index, tol);

    const std::int64_t cdim = inner.classical_dim;
    const std::int64_t qdim = inner.channel.dim() / cdim;
    const CqChannel combined =
        outer_plus ? combine_plus(inner.channel, tol) : combine_minus(inner.channel, tol);

    Matrix m0 = remap_pair(combined.rho0.matrix(), cdim, qdim, outer_plus);
    Matrix m1 = remap_pair(combined.rho1.matrix(), cdim, qdim, outer_plus);
    return SynthesizedChannel{
        n, index, outer_plus ? 2 * cdim * cdim : cdim * cdim,
        CqChannel(DensityOperator(std::move(m0), DensityOperator::Trust::Trusted, tol),
                  DensityOperator(std::move(m1), DensityOperator::Trust::Trusted, tol))};
}

// --- classical reduction ----------------------------------------------------

double ClassicalTable::bhattacharyya() const {
    double z = 0.0;
    for (std::size_t i = 0; i < p0.size(); ++i) z += std::sqrt(p0[i] * p1[i]);
    return std::min(z, 1.0);
}

std::optional<ClassicalReduction> try_classical_reduce(const CqChannel& w, double* commutator_norm,
                                                       const Tolerances& tol) {
    const Matrix& a = w.rho0.matrix();
    const Matrix& b = w.rho1.matrix();
    const double norm = trace_norm(a * b - b * a);
    if (commutator_norm) *commutator_norm = norm;
    if (norm > tol.commuting) return std::nullopt;

    // two-stage joint diagonalization: eigenbasis of rho0, then diagonalize
    // rho1 inside each degenerate cluster
    const std::int64_t d = w.dim();
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    Matrix basis = es.eigenvectors();
    Eigen::VectorXd vals = es.eigenvalues();
    const double cluster_tol = 1e-9;
    std::int64_t lo = 0;
    while (lo < d) {
        std::int64_t hi = lo + 1;
        while (hi < d && vals[hi] - vals[hi - 1] < cluster_tol) ++hi;
        if (hi - lo > 1) {
            Matrix sub = basis.middleCols(lo, hi - lo);
            Matrix restricted = sub.adjoint() * b * sub;
            Eigen::SelfAdjointEigenSolver<Matrix> es2((restricted + restricted.adjoint()) / 2.0);
            basis.middleCols(lo, hi - lo) = sub * es2.eigenvectors();
        }
        lo = hi;
    }

    ClassicalReduction red;
    red.commutator_norm = norm;
    red.table.p0.resize(d);
    red.table.p1.resize(d);
    for (std::int64_t i = 0; i < d; ++i) {
        const Vector v = basis.col(i);
        red.table.p0[i] = std::max(0.0, (v.adjoint() * a * v)(0, 0).real());
        red.table.p1[i] = std::max(0.0, (v.adjoint() * b * v)(0, 0).real());
    }
    red.basis = std::move(basis);
    return red;
}

ClassicalReduction classical_reduce(const CqChannel& w, const Tolerances& tol) {
    double norm = 0.0;
    auto red = try_classical_reduce(w, &norm, tol);
    if (!red) throw NonCommutingError(norm);
    return std::move(*red);
}

// --- table evolution --------------------------------------------------------

namespace {

ClassicalTable merge_table(const ClassicalTable& t, const EvolveOptions& opts) {
    struct Sym {
        double r;  // p0 / (p0 + p1)
        double p0, p1;
    };
    std::vector<Sym> syms;
    syms.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double mass = t.p0[i] + t.p1[i];
        if (mass <= 0.0) continue;
        syms.push_back({t.p0[i] / mass, t.p0[i], t.p1[i]});
    }
    std::sort(syms.begin(), syms.end(), [](const Sym& a, const Sym& b) { return a.r < b.r; });

    ClassicalTable out;
    std::size_t i = 0;
    while (i < syms.size()) {
        double p0 = syms[i].p0, p1 = syms[i].p1;
        std::size_t j = i + 1;
        while (j < syms.size() && syms[j].r - syms[i].r <= opts.merge_rel_tol) {
            p0 += syms[j].p0;
            p1 += syms[j].p1;
            ++j;
        }
        out.p0.push_back(p0);
        out.p1.push_back(p1);
        i = j;
    }
    return out;
}

ClassicalTable table_minus(const ClassicalTable& t, const EvolveOptions& opts) {
    ClassicalTable out;
    const std::size_t m = t.size();
    if (m * m > opts.alphabet_cap)
        throw ResourceError("exact table evolution: alphabet " + std::to_string(m * m) +
                            " exceeds cap " + std::to_string(opts.alphabet_cap));
    out.p0.reserve(m * m);
    out.p1.reserve(m * m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            out.p0.push_back(0.5 * (t.p0[a] * t.p0[b] + t.p1[a] * t.p1[b]));
            out.p1.push_back(0.5 * (t.p1[a] * t.p0[b] + t.p0[a] * t.p1[b]));
        }
    return merge_table(out, opts);
}

ClassicalTable table_plus(const ClassicalTable& t, const EvolveOptions& opts) {
    ClassicalTable out;
    const std::size_t m = t.size();
    if (2 * m * m > opts.alphabet_cap)
        throw ResourceError("exact table evolution: alphabet " + std::to_string(2 * m * m) +
                            " exceeds cap " + std::to_string(opts.alphabet_cap));
    out.p0.reserve(2 * m * m);
    out.p1.reserve(2 * m * m);
    for (std::size_t u1 = 0; u1 < 2; ++u1)
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) {
                const auto& pa0 = u1 == 0 ? t.p0 : t.p1;  // W(a | u1 ^ 0)
                const auto& pa1 = u1 == 0 ? t.p1 : t.p0;  // W(a | u1 ^ 1)
                out.p0.push_back(0.5 * pa0[a] * t.p0[b]);
                out.p1.push_back(0.5 * pa1[a] * t.p1[b]);
            }
    return merge_table(out, opts);
}

double log2_clamped(double v) {
    if (v <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::min(std::log2(v), 0.0);
}

struct BoundPair {
    double lo, hi;  // log2 of sqrt(F) bounds
};

BoundPair bound_plus(BoundPair b) { return {2 * b.lo, 2 * b.hi}; }

BoundPair bound_minus(BoundPair b, bool commuting) {
    double hi;
    if (b.hi > -500.0) {
        const double u = std::exp2(b.hi), l = std::exp2(b.lo);
        hi = log2_clamped(std::min(1.0, 2.0 * u - l * l));
    } else {
        hi = b.hi + 1.0;  // l^2 is negligible against 2u at this scale
    }
    double lo;
    if (commuting) {
        const double l2 = std::exp2(2.0 * b.lo);  // underflows harmlessly
        lo = b.lo + 0.5 * std::log2(2.0 - l2);
    } else {
        lo = b.lo;  // F(W^-) >= F(W)
    }
    return {std::min(lo, hi), hi};
}

}  // namespace

std::vector<ScalarTracker> evolve_scalar(const CqChannel& w, int n, ScalarMode mode,
                                         const EvolveOptions& opts, const Tolerances& tol) {
    if (n < 0 || n > 26) throw DimensionError("evolve_scalar: level out of range");
    std::vector<ScalarTracker> out;
    out.reserve(std::size_t(1) << n);

    if (mode == ScalarMode::exact_classical) {
        ClassicalReduction red = classical_reduce(w, tol);  // throws NonCommutingError
        // depth-first, minus branch first: leaves emerge in index order
        std::function<void(const ClassicalTable&, int)> walk = [&](const ClassicalTable& t,
                                                                   int left) {
            if (left == 0) {
                const double z = t.bhattacharyya();
                ScalarTracker tr;
                tr.exact_value = z;
                tr.lower_log2 = tr.upper_log2 = log2_clamped(z);
                out.push_back(tr);
                return;
            }
            walk(table_minus(t, opts), left - 1);
            walk(table_plus(t, opts), left - 1);
        };
        walk(red.table, n);
        return out;
    }

    const bool commuting = try_classical_reduce(w, nullptr, tol).has_value();
    const double f = fidelity(w.rho0, w.rho1, tol);
    const BoundPair base{0.5 * log2_clamped(f), 0.5 * log2_clamped(f)};
    std::function<void(BoundPair, int)> walk = [&](BoundPair b, int left) {
        if (left == 0) {
            ScalarTracker tr;
            tr.lower_log2 = b.lo;
            tr.upper_log2 = b.hi;
            out.push_back(tr);
            return;
        }
        walk(bound_minus(b, commuting), left - 1);
        walk(bound_plus(b), left - 1);
    };
    walk(base, n);
    return out;
}

std::string path_string(int n, std::int64_t index) {
    std::string s;
    s.reserve(n);
    const std::int64_t bits = index - 1;
    for (int k = n - 1; k >= 0; --k) s.push_back(((bits >> k) & 1) ? '+' : '-');
    return s;
}

std::string trajectory_csv(const std::vector<ScalarTracker>& trackers, int n) {
    std::string csv = "n,index,path,lower_log2,upper_log2,exact_value\n";
    for (std::size_t i = 0; i < trackers.size(); ++i) {
        const auto& t = trackers[i];
        csv += fmt_int(n);
        csv += ',';
        csv += fmt_int(static_cast<std::int64_t>(i) + 1);
        csv += ',';
        csv += path_string(n, static_cast<std::int64_t>(i) + 1);
        csv += ',';
        csv += fmt_real(t.lower_log2);
        csv += ',';
        csv += fmt_real(t.upper_log2);
        csv += ',';
        if (t.exact_value) csv += fmt_real(*t.exact_value);
        csv += '\n';
    }
    return csv;
}

namespace {

double good_threshold_log2(int n, double beta) {
    return -std::pow(std::ldexp(1.0, n), beta);  // log2 of 2^{-N^beta}
}

double poor_threshold_log2(int n, double beta) {
    // log2(1 - 2^{-N^beta})
    const double thr = std::exp2(-std::pow(std::ldexp(1.0, n), beta));
    return std::log1p(-thr) / std::numbers::ln2;
}

}  // namespace

bool tracker_good(const ScalarTracker& t, int n, double beta) {
    return t.upper_log2 < good_threshold_log2(n, beta);
}

bool tracker_poor(const ScalarTracker& t, int n, double beta) {
    return t.lower_log2 > poor_threshold_log2(n, beta);
}

PolarizationFractions polarization_fractions(const std::vector<ScalarTracker>& trackers, int n,
                                             double beta) {
    const double gthr = good_threshold_log2(n, beta);
    const double pthr = poor_threshold_log2(n, beta);
    std::int64_t good = 0, poor = 0, undecided = 0;
    for (const auto& t : trackers) {
        const bool g = t.upper_log2 < gthr;
        const bool p = t.lower_log2 > pthr;
        if (g)
            ++good;
        else if (p)
            ++poor;
        else if ((t.lower_log2 < gthr && t.upper_log2 >= gthr) ||
                 (t.lower_log2 <= pthr && t.upper_log2 > pthr))
            ++undecided;
    }
    const double total = static_cast<double>(trackers.size());
    return {good / total, poor / total, undecided / total};
}

// --- convergence process ----------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::int64_t trial) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(trial))));
}

std::vector<ConvergenceEstimate> wilson_estimates(const std::vector<std::int64_t>& counts,
                                                  std::int64_t trials) {
    std::vector<ConvergenceEstimate> out(counts.size());
    const double z = 1.959963984540054;  // 95%
    for (std::size_t n = 0; n < counts.size(); ++n) {
        const double phat = static_cast<double>(counts[n]) / trials;
        const double denom = 1.0 + z * z / trials;
        const double center = (phat + z * z / (2.0 * trials)) / denom;
        const double half =
            z * std::sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials)) / denom;
        out[n] = {static_cast<int>(n), phat, std::max(0.0, center - half),
                  std::min(1.0, center + half)};
    }
    return out;
}

}  // namespace

namespace {

void check_convergence_config(const ConvergenceConfig& cfg) {
    if (!(cfg.beta > 0.0 && cfg.beta < 1.0))
        throw DomainError("simulate_convergence: beta must lie in (0, 1)");
    if (cfg.q <= 0.0) throw DomainError("simulate_convergence: q must be positive");
    if (cfg.n_max < 0 || cfg.trials < 1)
        throw DomainError("simulate_convergence: bad n_max or trial count");
}

}  // namespace

std::vector<ConvergenceEstimate> simulate_convergence(const ConvergenceConfig& cfg, double x0) {
    check_convergence_config(cfg);
    if (!(x0 >= 0.0 && x0 <= 1.0)) throw DomainError("simulate_convergence: x0 outside [0,1]");
    const double lq = std::log2(cfg.q);
    std::vector<std::int64_t> counts(cfg.n_max + 1, 0);
    for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
        auto gen = trial_rng(cfg.seed, trial);
        std::bernoulli_distribution coin(0.5);
        double y = x0 > 0.0 ? std::log2(x0) : -std::numeric_limits<double>::infinity();
        for (int n = 0; n <= cfg.n_max; ++n) {
            if (y < -std::pow(2.0, n * cfg.beta)) ++counts[n];
            y = coin(gen) ? std::min(0.0, y + lq) : 2.0 * y;
        }
    }
    return wilson_estimates(counts, cfg.trials);
}

namespace {

/// Erasure probability when the merged table is BEC-structured (symbols
/// either reveal the input or erase it); empty otherwise.
std::optional<double> bec_parameter(const ClassicalTable& t) {
    double erased0 = 0.0, erased1 = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double p0 = t.p0[i], p1 = t.p1[i];
        const double mass = p0 + p1;
        if (mass <= 0.0) continue;
        const double r = p0 / mass;
        if (r < 1e-9 || r > 1.0 - 1e-9) continue;  // revealing symbol
        if (std::abs(r - 0.5) > 1e-9) return std::nullopt;
        erased0 += p0;
        erased1 += p1;
    }
    if (std::abs(erased0 - erased1) > 1e-9) return std::nullopt;
    return erased0;
}

}  // namespace

std::vector<ConvergenceEstimate> simulate_convergence(const ConvergenceConfig& cfg,
                                                      const CqChannel& w,
                                                      const EvolveOptions& opts) {
    check_convergence_config(cfg);
    const ClassicalReduction red = classical_reduce(w);
    std::vector<std::int64_t> counts(cfg.n_max + 1, 0);
    const auto eps = bec_parameter(merge_table(red.table, opts));

    if (eps) {
        // exact dual-log recursion: track log2(eps) and log2(1 - eps), both of
        // which stay representable at any depth
        const double le0 = log2_clamped(*eps);
        const double ld0 = log2_clamped(1.0 - *eps);
        for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
            auto gen = trial_rng(cfg.seed, trial);
            std::bernoulli_distribution coin(0.5);
            double le = le0, ld = ld0;
            for (int n = 0; n <= cfg.n_max; ++n) {
                const double e = std::exp2(le);
                const double x_log2 = ld + std::log2(1.0 + e);  // X = 1 - Z^2
                if (x_log2 < -std::pow(2.0, n * cfg.beta)) ++counts[n];
                if (coin(gen)) {
                    le = le + std::log2(2.0 - e);  // minus: eps' = eps (2 - eps)
                    ld = 2.0 * ld;
                } else {
                    ld = ld + std::log2(1.0 + e);  // plus: eps' = eps^2
                    le = 2.0 * le;
                }
            }
        }
        return wilson_estimates(counts, cfg.trials);
    }

    for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
        auto gen = trial_rng(cfg.seed, trial);
        std::bernoulli_distribution coin(0.5);
        ClassicalTable t = red.table;
        for (int n = 0; n <= cfg.n_max; ++n) {
            const double z = t.bhattacharyya();
            const double x = std::max(0.0, 1.0 - z * z);
            const bool below = x > 0.0 ? std::log2(x) < -std::pow(2.0, n * cfg.beta) : true;
            if (below) ++counts[n];
            t = coin(gen) ? table_minus(t, opts) : table_plus(t, opts);
        }
    }
    return wilson_estimates(counts, cfg.trials);
}

// --- pure-state invariance ---------------------------------------------------

namespace {

/// Purification of a rank<=2 operator with a 2-dimensional ancilla appended.
PureState purify_rank2(const Matrix& rho, const Tolerances& tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const std::int64_t d = rho.rows();
    Vector out = Vector::Zero(d * 2);
    Eigen::VectorXd vals = es.eigenvalues();
    // top-2 eigenvalues, clamped
    for (int k = 0; k < 2; ++k) {
        const std::int64_t idx = d - 1 - k;
        if (idx < 0) break;
        double lam = vals[idx];
        if (lam < 0.0) {
            if (lam < tol.psd_floor) throw DomainError("purify_rank2: not PSD");
            lam = 0.0;
        }
        const Vector v = es.eigenvectors().col(idx);
        for (std::int64_t i = 0; i < d; ++i) out[i * 2 + k] = std::sqrt(lam) * v[i];
    }
    const double norm = out.norm();
    if (std::abs(norm - 1.0) > 1e-8)
        throw DomainError("purify_rank2: rank exceeds 2 or trace differs from 1");
    return PureState(out / norm);
}

}  // namespace

PureInvarianceResult verify_pure_state_invariance(const PureState& psi0, const PureState& psi1,
                                                  const Tolerances& tol) {
    if (psi0.dim() != psi1.dim())
        throw DimensionError("verify_pure_state_invariance: dimension mismatch");
    const double f_w = std::norm(psi0.amplitudes().dot(psi1.amplitudes()));

    const Matrix p0 = psi0.amplitudes() * psi0.amplitudes().adjoint();
    const Matrix p1 = psi1.amplitudes() * psi1.amplitudes().adjoint();
    const Matrix minus0 = 0.5 * (tensor(p0, p0, tol) + tensor(p1, p1, tol));
    const Matrix minus1 = 0.5 * (tensor(p0, p1, tol) + tensor(p1, p0, tol));

    const PureState pur0 = purify_rank2(minus0, tol);
    const PureState pur1 = purify_rank2(minus1, tol);
    const std::int64_t d2 = minus0.rows();
    const auto res = uhlmann_isometry(pur0, pur1, {d2, 2}, /*acting_side=*/1, tol);

    PureInvarianceResult r;
    r.f_w = f_w;
    r.f_minus = res.overlap;
    r.gap = std::abs(r.f_w - r.f_minus);
    return r;
}

}  // namespace qpc
