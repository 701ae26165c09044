#pragma once

#include "qpolar/channels.hpp"
#include "qpolar/polarize.hpp"
#include "qpolar/wiretap.hpp"

#include <map>
#include <optional>
#include <random>
#include <vector>

namespace qpc {

/// Which indices the decoder substitutes rather than decides.
struct DecodeLayout {
    std::vector<std::optional<std::uint8_t>> pinned;  // size N; empty = decode

    std::size_t size() const { return pinned.size(); }
    static DecodeLayout from_code(const WiretapCode& code);
    static DecodeLayout all_information(std::size_t n_uses);
};

// --- classical successive cancellation ---------------------------------------

/// Natural-order successive cancellation over a reduced transition table.
/// O(N log N) per codeword via the lazily updated likelihood tree. Ties
/// resolve to 0.
class ClassicalScDecoder {
public:
    ClassicalScDecoder(ClassicalTable table, int n);

    /// `symbols` holds the observed outcome index per channel use.
    BitVec decode(const std::vector<int>& symbols, const DecodeLayout& layout) const;

    int level() const { return n_; }

private:
    ClassicalTable table_;
    int n_;
};

/// Exhaustive-posterior decoder used as an oracle in tests (O(2^N) per bit).
/// `first_contradiction`, when given, receives the first decoded index whose
/// posteriors both vanish (evidence inconsistent with earlier tie-breaking),
/// or the block length if none; decisions beyond that point are junk in any
/// successive-cancellation implementation.
BitVec sc_decode_classical_bruteforce(const ClassicalTable& table,
                                      const std::vector<int>& symbols,
                                      const DecodeLayout& layout,
                                      std::size_t* first_contradiction = nullptr);

struct McSummary {
    std::int64_t trials = 0;
    std::int64_t block_errors = 0;
    double error_rate = 0.0;
    std::vector<std::uint8_t> error_flags;  // per trial
};

/// Monte Carlo of the classical SC decoder over the wiretap code: random
/// information and randomized bits, channel sampling from the table, block
/// error counted jointly on A and Y. Deterministic for a fixed seed.
McSummary run_classical_mc(const ClassicalTable& table, const WiretapCode& code,
                           std::int64_t trials, std::uint64_t seed);

// --- quantum successive cancellation ------------------------------------------

/// Helstrom projector cache for the synthesized-channel cascade: positive
/// eigenspace of the difference of the two prefix-conditioned averaged
/// states. Zero eigenvalues side with outcome 0.
class HelstromCascade {
public:
    HelstromCascade(CqChannel w, int n, const Tolerances& tol = default_tols());

    struct Projector {
        Matrix pos_columns;  // d x r orthonormal columns spanning the outcome-0 space
    };

    /// prefix_bits packs u_1..u_{i-1} with u_1 as the most significant bit.
    const Projector& projector(int index0, std::uint64_t prefix_bits) const;

    /// Prefix-conditioned averaged state for hypothesis v at 0-based index.
    Matrix conditional_state(int index0, std::uint64_t prefix_bits, int v) const;

    std::int64_t dim() const { return dim_; }
    int level() const { return n_; }
    const CqChannel& channel() const { return w_; }

private:
    CqChannel w_;
    int n_;
    std::int64_t dim_;
    Tolerances tol_;
    mutable std::map<std::pair<int, std::uint64_t>, Projector> cache_;
};

struct QuantumScOutcome {
    BitVec decisions;
    DensityOperator post_state;
};

/// Measurement-cascade decoder on a density operator over B^N: Helstrom
/// measurement per decoded index, projection-postulate update, pinned
/// indices substituted without measurement.
QuantumScOutcome sc_decode_quantum(const HelstromCascade& cascade, const DensityOperator& state,
                                   const DecodeLayout& layout, std::mt19937_64& rng,
                                   const Tolerances& tol = default_tols());

/// Pure-state fast path (same measurement statistics on product inputs).
BitVec sc_decode_quantum_pure(const HelstromCascade& cascade, const Vector& state,
                              const DecodeLayout& layout, std::mt19937_64& rng);

/// Monte Carlo of the quantum SC decoder: samples a codeword, draws a pure
/// product state from the eigendecompositions of the channel outputs, and
/// runs the measurement cascade. Block error counted jointly on A and Y.
McSummary run_quantum_mc(const HelstromCascade& cascade, const WiretapCode& code,
                         std::int64_t trials, std::uint64_t seed);

}  // namespace qpc
