#include "qpolar/wiretap.hpp"

#include "qpolar/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qpc {

using nlohmann::json;

char set_label_char(SetLabel s) {
    switch (s) {
        case SetLabel::A: return 'A';
        case SetLabel::B: return 'B';
        case SetLabel::X: return 'X';
        case SetLabel::Y: return 'Y';
    }
    return '?';
}

std::int64_t PolarPartition::count(SetLabel s) const {
    return std::count(labels.begin(), labels.end(), s);
}

std::vector<std::int64_t> PolarPartition::members(SetLabel s) const {
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == s) out.push_back(static_cast<std::int64_t>(i));
    return out;
}

namespace {

std::vector<ScalarTracker> evolve_auto(const CqChannel& w, int n,
                                       const std::optional<ScalarMode>& mode,
                                       const EvolveOptions& opts, const Tolerances& tol,
                                       bool* exact_out) {
    if (mode) {
        *exact_out = (*mode == ScalarMode::exact_classical);
        return evolve_scalar(w, n, *mode, opts, tol);
    }
    try {
        auto t = evolve_scalar(w, n, ScalarMode::exact_classical, opts, tol);
        *exact_out = true;
        return t;
    } catch (const NonCommutingError&) {
    } catch (const ResourceError&) {
    }
    *exact_out = false;
    return evolve_scalar(w, n, ScalarMode::fidelity_bounds, opts, tol);
}

double good_thr_log2(int n, double beta) { return -std::pow(std::ldexp(1.0, n), beta); }

double poor_thr_log2(int n, double beta) {
    const double thr = std::exp2(-std::pow(std::ldexp(1.0, n), beta));
    return std::log1p(-thr) / std::numbers::ln2;
}

}  // namespace

PolarPartition partition_channels(const CqChannel& w, const CqChannel& wstar, int n, double beta,
                                  const PartitionOptions& opts, const Tolerances& tol) {
    if (n < 0 || n > 26) throw DimensionError("partition_channels: level out of range");
    if (!(beta > 0.0 && beta < 0.5))
        throw DomainError("partition_channels: beta must lie in (0, 1/2)");

    PolarPartition p;
    p.n = n;
    p.beta = beta;
    p.bob = evolve_auto(w, n, opts.bob_mode, opts.evolve, tol, &p.exact_bob);
    p.eve = evolve_auto(wstar, n, opts.eve_mode, opts.evolve, tol, &p.exact_eve);

    const double gthr = good_thr_log2(n, beta);
    const double pthr = poor_thr_log2(n, beta);
    const std::size_t big_n = p.bob.size();
    p.labels.resize(big_n);
    for (std::size_t i = 0; i < big_n; ++i) {
        const bool good = p.bob[i].upper_log2 < gthr;
        const bool poor = p.eve[i].lower_log2 > pthr;
        p.labels[i] = poor ? (good ? SetLabel::A : SetLabel::B)
                           : (good ? SetLabel::Y : SetLabel::X);
        if (p.bob[i].upper_log2 >= gthr && p.bob[i].lower_log2 < gthr) ++p.undecided_bob;
        if (p.eve[i].lower_log2 <= pthr && p.eve[i].upper_log2 > pthr) ++p.undecided_eve;
    }

    // Lemma-style subset checks apply when both sides are exact
    p.subset_check_applicable = p.exact_bob && p.exact_eve;
    if (p.subset_check_applicable) {
        for (std::size_t i = 0; i < big_n; ++i) {
            const bool good_eve = p.eve[i].upper_log2 < gthr;
            const bool good_bob = p.bob[i].upper_log2 < gthr;
            const bool poor_bob = p.bob[i].lower_log2 > pthr;
            const bool poor_eve = p.eve[i].lower_log2 > pthr;
            if (good_eve && !good_bob) p.degraded_subset_ok = false;  // G(W*) not in G(W)
            if (poor_bob && !poor_eve) p.degraded_subset_ok = false;
        }
    }
    return p;
}

CodeRates code_rates(const PolarPartition& p) {
    const double n = static_cast<double>(p.size());
    return CodeRates{p.count(SetLabel::A) / n, p.count(SetLabel::X) / n,
                     p.count(SetLabel::B) / n, p.count(SetLabel::Y) / n};
}

double security_bound(const PolarPartition& p) {
    if (p.eve.size() != p.labels.size())
        throw DimensionError("security_bound: missing Eve trackers");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.labels.size(); ++i) {
        if (p.labels[i] != SetLabel::A) continue;
        // 1 - l^2 = -expm1(2 ln2 log2 l), stable for l near 1
        const double one_minus_f = -std::expm1(2.0 * std::numbers::ln2 * p.eve[i].lower_log2);
        sum += std::sqrt(std::max(0.0, one_minus_f));
    }
    return sum;
}

double reliability_bound(const PolarPartition& p) {
    if (p.bob.size() != p.labels.size())
        throw DimensionError("reliability_bound: missing Bob trackers");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.labels.size(); ++i) {
        if (p.labels[i] != SetLabel::A && p.labels[i] != SetLabel::Y) continue;
        sum += 0.5 * std::exp2(p.bob[i].upper_log2);
    }
    return std::clamp(2.0 * std::sqrt(sum), 0.0, 2.0);
}

WiretapCode WiretapCode::with_zero_frozen(PolarPartition p, std::uint64_t seed) {
    WiretapCode code;
    code.frozen.assign(p.count(SetLabel::B), 0);
    code.key.assign(p.count(SetLabel::X), 0);
    code.partition = std::move(p);
    code.rng_seed = seed;
    return code;
}

BitVec WiretapCode::assemble(const BitVec& info_bits, const BitVec& random_bits) const {
    const auto& labels = partition.labels;
    if (static_cast<std::int64_t>(frozen.size()) != partition.count(SetLabel::B) ||
        static_cast<std::int64_t>(key.size()) != partition.count(SetLabel::X))
        throw DimensionError("WiretapCode: frozen/key vector sizes do not match the partition");
    if (static_cast<std::int64_t>(info_bits.size()) != partition.count(SetLabel::A) ||
        static_cast<std::int64_t>(random_bits.size()) != partition.count(SetLabel::Y))
        throw DimensionError("WiretapCode: info/random vector sizes do not match the partition");
    BitVec u(labels.size());
    std::size_t ia = 0, ib = 0, ix = 0, iy = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        switch (labels[i]) {
            case SetLabel::A: u[i] = info_bits[ia++]; break;
            case SetLabel::B: u[i] = frozen[ib++]; break;
            case SetLabel::X: u[i] = key[ix++]; break;
            case SetLabel::Y: u[i] = random_bits[iy++]; break;
        }
    }
    return u;
}

double exact_leakage(const WiretapCode& code, const IsometricChannel& ch, const Tolerances& tol) {
    const PolarPartition& p = code.partition;
    const std::int64_t big_n = p.size();
    const CqChannel we = eve_channel(ch);
    std::int64_t dim_total = 1;
    for (std::int64_t j = 0; j < big_n; ++j) {
        dim_total *= we.dim();
        if (dim_total > tol.dim_cap)
            throw ResourceError("exact_leakage: E^N dimension exceeds cap");
    }

    const auto a_idx = p.members(SetLabel::A);
    const auto x_idx = p.members(SetLabel::X);
    const auto y_idx = p.members(SetLabel::Y);
    const std::size_t na = a_idx.size(), nx = x_idx.size(), ny = y_idx.size();

    const Matrix* rho[2] = {&we.rho0.matrix(), &we.rho1.matrix()};
    const double weight = std::ldexp(1.0, -static_cast<int>(nx + ny));

    Matrix avg = Matrix::Zero(dim_total, dim_total);
    double cond_entropy = 0.0;
    BitVec info(na), random(ny);
    WiretapCode scratch = code;
    for (std::size_t ua = 0; ua < (std::size_t(1) << na); ++ua) {
        for (std::size_t k = 0; k < na; ++k) info[k] = (ua >> (na - 1 - k)) & 1;
        Matrix cond = Matrix::Zero(dim_total, dim_total);
        for (std::size_t mask = 0; mask < (std::size_t(1) << (nx + ny)); ++mask) {
            for (std::size_t k = 0; k < nx; ++k) scratch.key[k] = (mask >> k) & 1;
            for (std::size_t k = 0; k < ny; ++k) random[k] = (mask >> (nx + k)) & 1;
            const BitVec x = polar_encode(scratch.assemble(info, random));
            Matrix term = *rho[x[0]];
            for (std::int64_t j = 1; j < big_n; ++j) term = tensor(term, *rho[x[j]], tol);
            cond += weight * term;
        }
        DensityOperator cond_op(std::move(cond), DensityOperator::Trust::Trusted, tol);
        cond_entropy += von_neumann_entropy(cond_op, tol);
        avg += cond_op.matrix();
    }
    const double scale = std::ldexp(1.0, -static_cast<int>(na));
    avg *= scale;
    cond_entropy *= scale;
    DensityOperator avg_op(std::move(avg), DensityOperator::Trust::Trusted, tol);
    return std::max(0.0, von_neumann_entropy(avg_op, tol) - cond_entropy);
}

namespace {

double round12(double v) {
    // round-trip through the 12-significant-digit text form used in files
    return std::strtod(fmt_real(v).c_str(), nullptr);
}

}  // namespace

std::string SecurityReport::to_json() const {
    json j;
    j["rate"] = round12(rates.rate);
    j["key_rate"] = round12(rates.key_rate);
    j["frozen_rate"] = round12(rates.frozen_rate);
    j["random_rate"] = round12(rates.random_rate);
    j["security_bound"] = round12(security);
    j["reliability_bound"] = round12(reliability);
    if (leakage_exact)
        j["leakage_exact"] = round12(*leakage_exact);
    else
        j["leakage_exact"] = nullptr;
    j["undecided"] = undecided;
    return j.dump(2) + "\n";
}

SecurityReport make_security_report(const PolarPartition& p, std::optional<double> leakage) {
    SecurityReport r;
    r.rates = code_rates(p);
    r.security = security_bound(p);
    r.reliability = reliability_bound(p);
    r.leakage_exact = leakage;
    r.undecided = p.undecided_bob + p.undecided_eve;
    return r;
}

std::string partition_csv(const PolarPartition& p) {
    std::string csv = "index,set,bob_upper_log2,eve_lower_log2\n";
    for (std::size_t i = 0; i < p.labels.size(); ++i) {
        csv += fmt_int(static_cast<std::int64_t>(i) + 1);
        csv += ',';
        csv += set_label_char(p.labels[i]);
        csv += ',';
        csv += fmt_real(p.bob[i].upper_log2);
        csv += ',';
        csv += fmt_real(p.eve[i].lower_log2);
        csv += '\n';
    }
    return csv;
}

}  // namespace qpc
