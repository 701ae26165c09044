#include "qpolar/sc_decode.hpp"

#include "qpolar/encoding.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace qpc {

DecodeLayout DecodeLayout::from_code(const WiretapCode& code) {
    DecodeLayout layout;
    layout.pinned.resize(code.partition.labels.size());
    std::size_t ib = 0, ix = 0;
    for (std::size_t i = 0; i < layout.pinned.size(); ++i) {
        switch (code.partition.labels[i]) {
            case SetLabel::B: layout.pinned[i] = code.frozen[ib++]; break;
            case SetLabel::X: layout.pinned[i] = code.key[ix++]; break;
            default: break;
        }
    }
    return layout;
}

DecodeLayout DecodeLayout::all_information(std::size_t n_uses) {
    DecodeLayout layout;
    layout.pinned.resize(n_uses);
    return layout;
}

// --- classical SC -------------------------------------------------------------

namespace {

struct ProbPair {
    double p0 = 0.0, p1 = 0.0;

    ProbPair normalized() const {
        const double s = p0 + p1;
        if (s <= 0.0) return {0.5, 0.5};
        return {p0 / s, p1 / s};
    }
};

ProbPair f_minus(ProbPair a, ProbPair b) {
    return ProbPair{a.p0 * b.p0 + a.p1 * b.p1, a.p1 * b.p0 + a.p0 * b.p1}.normalized();
}

ProbPair f_plus(ProbPair a, ProbPair b, int u_first) {
    const double a0 = u_first == 0 ? a.p0 : a.p1;  // W(a | u1 ^ 0)
    const double a1 = u_first == 0 ? a.p1 : a.p0;
    return ProbPair{a0 * b.p0, a1 * b.p1}.normalized();
}

/// Near-ties (different summation orders leave ~1e-16 noise on mathematically
/// equal posteriors) resolve to 0, like exact ties.
std::uint8_t ml_decision(double p0, double p1) {
    return (p1 - p0) > 1e-9 * (p0 + p1) ? 1 : 0;
}

/// Lazily evaluated likelihood tree for natural decoding order. Node (d, b)
/// covers channel block b of size N/2^d; its substream bit j needs the
/// children at phase j/2 plus its own previous decision on odd phases.
class ScTree {
public:
    ScTree(const std::vector<ProbPair>& leaves, int n) : n_(n) {
        levels_.resize(n + 1);
        for (int d = 0; d <= n; ++d) {
            const std::size_t nodes = std::size_t(1) << d;
            levels_[d].resize(nodes);
            const std::size_t block = std::size_t(1) << (n - d);
            for (auto& node : levels_[d]) {
                node.cached_phase = -1;
                node.decisions.assign(block, 0);
                node.n_pushed = 0;
            }
        }
        for (std::size_t c = 0; c < leaves.size(); ++c) {
            levels_[n][c].cached_phase = 0;
            levels_[n][c].value = leaves[c];
        }
    }

    ProbPair likelihood(int d, std::size_t b, std::int64_t phase) {
        Node& node = levels_[d][b];
        if (node.cached_phase == phase) return node.value;
        const ProbPair lf = likelihood(d + 1, 2 * b, phase >> 1);
        const ProbPair ls = likelihood(d + 1, 2 * b + 1, phase >> 1);
        node.value = (phase % 2 == 0) ? f_minus(lf, ls)
                                      : f_plus(lf, ls, node.decisions[phase - 1]);
        node.cached_phase = phase;
        return node.value;
    }

    void push_decision(int d, std::size_t b, std::int64_t phase, std::uint8_t bit) {
        Node& node = levels_[d][b];
        node.decisions[phase] = bit;
        if (phase % 2 == 1 && d < n_) {
            push_decision(d + 1, 2 * b, phase >> 1, node.decisions[phase - 1] ^ bit);
            push_decision(d + 1, 2 * b + 1, phase >> 1, bit);
        }
    }

private:
    struct Node {
        std::int64_t cached_phase = -1;
        ProbPair value;
        std::vector<std::uint8_t> decisions;
        std::size_t n_pushed = 0;
    };
    int n_;
    std::vector<std::vector<Node>> levels_;
};

}  // namespace

ClassicalScDecoder::ClassicalScDecoder(ClassicalTable table, int n)
    : table_(std::move(table)), n_(n) {
    if (n < 0 || n > 24) throw DimensionError("ClassicalScDecoder: level out of range");
}

BitVec ClassicalScDecoder::decode(const std::vector<int>& symbols,
                                  const DecodeLayout& layout) const {
    const std::size_t big_n = std::size_t(1) << n_;
    if (symbols.size() != big_n || layout.size() != big_n)
        throw DimensionError("ClassicalScDecoder: symbol/layout length mismatch");

    std::vector<ProbPair> leaves(big_n);
    for (std::size_t c = 0; c < big_n; ++c) {
        const int y = symbols[c];
        if (y < 0 || static_cast<std::size_t>(y) >= table_.size())
            throw DimensionError("ClassicalScDecoder: symbol out of alphabet");
        leaves[c] = ProbPair{table_.p0[y], table_.p1[y]}.normalized();
    }

    ScTree tree(leaves, n_);
    BitVec u(big_n);
    for (std::size_t i = 0; i < big_n; ++i) {
        std::uint8_t bit;
        if (layout.pinned[i]) {
            bit = *layout.pinned[i];
        } else {
            const ProbPair l = tree.likelihood(0, 0, static_cast<std::int64_t>(i));
            bit = ml_decision(l.p0, l.p1);
        }
        u[i] = bit;
        tree.push_decision(0, 0, static_cast<std::int64_t>(i), bit);
    }
    return u;
}

BitVec sc_decode_classical_bruteforce(const ClassicalTable& table,
                                      const std::vector<int>& symbols,
                                      const DecodeLayout& layout,
                                      std::size_t* first_contradiction) {
    const std::size_t big_n = symbols.size();
    if (!is_power_of_two(big_n))
        throw DimensionError("bruteforce decoder: length must be a power of two");
    if (first_contradiction) *first_contradiction = big_n;
    BitVec u(big_n, 0);
    for (std::size_t i = 0; i < big_n; ++i) {
        if (layout.pinned[i]) {
            u[i] = *layout.pinned[i];
            continue;
        }
        double post[2] = {0.0, 0.0};
        const std::size_t free_after = big_n - 1 - i;
        for (int v = 0; v < 2; ++v) {
            u[i] = static_cast<std::uint8_t>(v);
            for (std::size_t suffix = 0; suffix < (std::size_t(1) << free_after); ++suffix) {
                for (std::size_t k = 0; k < free_after; ++k)
                    u[i + 1 + k] = (suffix >> (free_after - 1 - k)) & 1;
                const BitVec x = polar_encode(u);
                double prod = 1.0;
                for (std::size_t c = 0; c < big_n; ++c)
                    prod *= (x[c] == 0 ? table.p0 : table.p1)[symbols[c]];
                post[v] += prod;
            }
        }
        if (post[0] + post[1] <= 0.0 && first_contradiction && *first_contradiction == big_n)
            *first_contradiction = i;
        u[i] = ml_decision(post[0], post[1]);
    }
    return u;
}

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

int sample_symbol(const std::vector<double>& probs, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double r = unif(rng);
    for (std::size_t y = 0; y < probs.size(); ++y) {
        r -= probs[y];
        if (r <= 0.0) return static_cast<int>(y);
    }
    return static_cast<int>(probs.size()) - 1;
}

bool block_error_on_decoded(const BitVec& decoded, const BitVec& truth,
                            const DecodeLayout& layout) {
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (!layout.pinned[i] && decoded[i] != truth[i]) return true;
    return false;
}

McSummary finish_summary(std::vector<std::uint8_t> flags) {
    McSummary s;
    s.trials = static_cast<std::int64_t>(flags.size());
    s.block_errors = std::count(flags.begin(), flags.end(), std::uint8_t(1));
    s.error_rate = s.trials ? static_cast<double>(s.block_errors) / s.trials : 0.0;
    s.error_flags = std::move(flags);
    return s;
}

}  // namespace

McSummary run_classical_mc(const ClassicalTable& table, const WiretapCode& code,
                           std::int64_t trials, std::uint64_t seed) {
    const std::size_t big_n = code.partition.labels.size();
    const int n = code.partition.n;
    const ClassicalScDecoder decoder(table, n);
    const DecodeLayout layout = DecodeLayout::from_code(code);

    const std::size_t na = code.partition.count(SetLabel::A);
    const std::size_t ny = code.partition.count(SetLabel::Y);
    std::vector<std::uint8_t> flags(trials, 0);
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        auto rng = trial_rng(seed ^ code.rng_seed, trial);
        std::uniform_int_distribution<int> bit(0, 1);
        BitVec info(na), rnd(ny);
        for (auto& b : info) b = static_cast<std::uint8_t>(bit(rng));
        for (auto& b : rnd) b = static_cast<std::uint8_t>(bit(rng));
        const BitVec u = code.assemble(info, rnd);
        const BitVec x = polar_encode(u);
        std::vector<int> symbols(big_n);
        for (std::size_t c = 0; c < big_n; ++c)
            symbols[c] = sample_symbol(x[c] == 0 ? table.p0 : table.p1, rng);
        const BitVec decoded = decoder.decode(symbols, layout);
        flags[trial] = block_error_on_decoded(decoded, u, layout) ? 1 : 0;
    }
    return finish_summary(std::move(flags));
}

// --- quantum SC ----------------------------------------------------------------

HelstromCascade::HelstromCascade(CqChannel w, int n, const Tolerances& tol)
    : w_(std::move(w)), n_(n), tol_(tol) {
    if (n < 0 || n > 12) throw DimensionError("HelstromCascade: level out of range");
    dim_ = 1;
    for (std::int64_t j = 0; j < (std::int64_t(1) << n_); ++j) {
        dim_ *= w_.dim();
        if (dim_ > tol_.dim_cap) throw ResourceError("HelstromCascade: B^N dimension exceeds cap");
    }
}

Matrix HelstromCascade::conditional_state(int index0, std::uint64_t prefix_bits, int v) const {
    const std::int64_t big_n = std::int64_t(1) << n_;
    const Matrix* rho[2] = {&w_.rho0.matrix(), &w_.rho1.matrix()};
    const std::int64_t free_after = big_n - 1 - index0;
    Matrix acc = Matrix::Zero(dim_, dim_);
    BitVec u(big_n);
    for (int k = 0; k < index0; ++k) u[k] = (prefix_bits >> (index0 - 1 - k)) & 1;
    u[index0] = static_cast<std::uint8_t>(v);
    for (std::int64_t suffix = 0; suffix < (std::int64_t(1) << free_after); ++suffix) {
        for (std::int64_t k = 0; k < free_after; ++k)
            u[index0 + 1 + k] = (suffix >> (free_after - 1 - k)) & 1;
        const BitVec x = polar_encode(u);
        Matrix term = *rho[x[0]];
        for (std::int64_t j = 1; j < big_n; ++j) term = tensor(term, *rho[x[j]], tol_);
        acc += term;
    }
    return std::ldexp(1.0, -static_cast<int>(free_after)) * acc;
}

const HelstromCascade::Projector& HelstromCascade::projector(int index0,
                                                             std::uint64_t prefix_bits) const {
    const auto key = std::make_pair(index0, prefix_bits);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    const Matrix delta = conditional_state(index0, prefix_bits, 0) -
                         conditional_state(index0, prefix_bits, 1);
    Eigen::SelfAdjointEigenSolver<Matrix> es(delta);
    // zero eigenvalues side with outcome 0
    std::vector<std::int64_t> pos;
    for (std::int64_t k = 0; k < dim_; ++k)
        if (es.eigenvalues()[k] >= -1e-12) pos.push_back(k);
    Projector proj;
    proj.pos_columns.resize(dim_, static_cast<std::int64_t>(pos.size()));
    for (std::size_t c = 0; c < pos.size(); ++c)
        proj.pos_columns.col(c) = es.eigenvectors().col(pos[c]);
    return cache_.emplace(key, std::move(proj)).first->second;
}

QuantumScOutcome sc_decode_quantum(const HelstromCascade& cascade, const DensityOperator& state,
                                   const DecodeLayout& layout, std::mt19937_64& rng,
                                   const Tolerances& tol) {
    const std::int64_t big_n = std::int64_t(1) << cascade.level();
    if (state.dim() != cascade.dim())
        throw DimensionError("sc_decode_quantum: state dimension mismatch");
    if (static_cast<std::int64_t>(layout.size()) != big_n)
        throw DimensionError("sc_decode_quantum: layout length mismatch");

    Matrix rho = state.matrix();
    BitVec u(big_n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uint64_t prefix = 0;
    for (std::int64_t i = 0; i < big_n; ++i) {
        if (layout.pinned[i]) {
            u[i] = *layout.pinned[i];
        } else {
            const auto& proj = cascade.projector(static_cast<int>(i), prefix);
            const Matrix p = proj.pos_columns * proj.pos_columns.adjoint();
            const double p0 = std::clamp((p * rho).trace().real(), 0.0, 1.0);
            const bool outcome0 = unif(rng) < p0;
            u[i] = outcome0 ? 0 : 1;
            Matrix updated = outcome0 ? Matrix(p * rho * p)
                                      : Matrix(rho - p * rho - rho * p + p * rho * p);
            const double norm = updated.trace().real();
            if (norm > 1e-300)
                rho = updated / norm;
            else
                rho = Matrix::Identity(cascade.dim(), cascade.dim()) /
                      static_cast<double>(cascade.dim());
        }
        prefix = (prefix << 1) | u[i];
    }
    return QuantumScOutcome{std::move(u),
                            DensityOperator((rho + rho.adjoint()) / 2.0,
                                            DensityOperator::Trust::Trusted, tol)};
}

BitVec sc_decode_quantum_pure(const HelstromCascade& cascade, const Vector& state,
                              const DecodeLayout& layout, std::mt19937_64& rng) {
    const std::int64_t big_n = std::int64_t(1) << cascade.level();
    Vector psi = state;
    BitVec u(big_n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uint64_t prefix = 0;
    for (std::int64_t i = 0; i < big_n; ++i) {
        if (layout.pinned[i]) {
            u[i] = *layout.pinned[i];
        } else {
            const auto& proj = cascade.projector(static_cast<int>(i), prefix);
            const Vector coords = proj.pos_columns.adjoint() * psi;
            const double p0 = std::clamp(coords.squaredNorm(), 0.0, 1.0);
            const bool outcome0 = unif(rng) < p0;
            u[i] = outcome0 ? 0 : 1;
            Vector updated = outcome0 ? Vector(proj.pos_columns * coords)
                                      : Vector(psi - proj.pos_columns * coords);
            const double norm = updated.norm();
            if (norm > 1e-150) psi = updated / norm;
        }
        prefix = (prefix << 1) | u[i];
    }
    return u;
}

McSummary run_quantum_mc(const HelstromCascade& cascade, const WiretapCode& code,
                         std::int64_t trials, std::uint64_t seed) {
    const std::size_t big_n = code.partition.labels.size();
    const DecodeLayout layout = DecodeLayout::from_code(code);
    const CqChannel& w = cascade.channel();

    // eigendecompositions of the two outputs for product-state sampling
    Eigen::SelfAdjointEigenSolver<Matrix> es0(w.rho0.matrix());
    Eigen::SelfAdjointEigenSolver<Matrix> es1(w.rho1.matrix());
    const Eigen::VectorXd* vals[2] = {&es0.eigenvalues(), &es1.eigenvalues()};
    const Matrix* vecs[2] = {&es0.eigenvectors(), &es1.eigenvectors()};

    const std::size_t na = code.partition.count(SetLabel::A);
    const std::size_t ny = code.partition.count(SetLabel::Y);
    std::vector<std::uint8_t> flags(trials, 0);
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        auto rng = trial_rng(seed ^ code.rng_seed, trial);
        std::uniform_int_distribution<int> bit(0, 1);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        BitVec info(na), rnd(ny);
        for (auto& b : info) b = static_cast<std::uint8_t>(bit(rng));
        for (auto& b : rnd) b = static_cast<std::uint8_t>(bit(rng));
        const BitVec u = code.assemble(info, rnd);
        const BitVec x = polar_encode(u);

        Vector psi = Vector::Ones(1);
        for (std::size_t c = 0; c < big_n; ++c) {
            double r = unif(rng);
            std::int64_t pick = w.dim() - 1;
            for (std::int64_t k = 0; k < w.dim(); ++k) {
                r -= std::max(0.0, (*vals[x[c]])[k]);
                if (r <= 0.0) {
                    pick = k;
                    break;
                }
            }
            psi = tensor(Matrix(psi), Matrix(vecs[x[c]]->col(pick))).col(0);
        }
        const BitVec decoded = sc_decode_quantum_pure(cascade, psi, layout, rng);
        flags[trial] = block_error_on_decoded(decoded, u, layout) ? 1 : 0;
    }
    return finish_summary(std::move(flags));
}

}  // namespace qpc
