#pragma once

#include "qpolar/channels.hpp"
#include "qpolar/encoding.hpp"
#include "qpolar/polarize.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qpc {

enum class SetLabel : std::uint8_t { A, B, X, Y };

char set_label_char(SetLabel s);

/// Four-way index partition: A info, B frozen, X key, Y randomized.
struct PolarPartition {
    int n = 0;
    double beta = 0.2;
    std::vector<SetLabel> labels;        // size N = 2^n, index order
    std::vector<ScalarTracker> bob;      // sqrt(F) trackers for W
    std::vector<ScalarTracker> eve;      // sqrt(F) trackers for W*
    bool exact_bob = false;
    bool exact_eve = false;
    std::int64_t undecided_bob = 0;      // intervals straddling the good threshold
    std::int64_t undecided_eve = 0;      // intervals straddling the poor threshold
    bool subset_check_applicable = false;
    bool degraded_subset_ok = true;      // good/bad set inclusions of the degraded pair

    std::int64_t size() const { return static_cast<std::int64_t>(labels.size()); }
    std::int64_t count(SetLabel s) const;
    std::vector<std::int64_t> members(SetLabel s) const;  // 0-based indices
};

struct PartitionOptions {
    /// empty = auto: exact when the channel reduces classically and the
    /// alphabet stays within bounds, interval bounds otherwise
    std::optional<ScalarMode> bob_mode;
    std::optional<ScalarMode> eve_mode;
    EvolveOptions evolve;
};

PolarPartition partition_channels(const CqChannel& w, const CqChannel& wstar, int n, double beta,
                                  const PartitionOptions& opts = {},
                                  const Tolerances& tol = default_tols());

struct CodeRates {
    double rate = 0.0;         // |A|/N
    double key_rate = 0.0;     // |X|/N
    double frozen_rate = 0.0;  // |B|/N
    double random_rate = 0.0;  // |Y|/N
};

CodeRates code_rates(const PolarPartition& p);

/// sum over A of sqrt(1 - lower^2) on the Eve trackers.
double security_bound(const PolarPartition& p);

/// 2 sqrt( sum over A and Y of upper/2 ) on the Bob trackers, clamped to [0,2].
double reliability_bound(const PolarPartition& p);

struct WiretapCode {
    PolarPartition partition;
    BitVec frozen;  // values on B, index order
    BitVec key;     // values on X, index order
    std::uint64_t rng_seed = 0;

    static WiretapCode with_zero_frozen(PolarPartition p, std::uint64_t seed);
    /// Full input vector u for given information and randomized bits.
    BitVec assemble(const BitVec& info_bits, const BitVec& random_bits) const;
};

/// Exact Holevo leakage I(U_A ; E^N): uniform information bits, uniform
/// randomized bits on Y, the frozen vector fixed, and the key on X averaged
/// over Eve's view. Requires the full E^N space to fit the dimension cap.
double exact_leakage(const WiretapCode& code, const IsometricChannel& ch,
                     const Tolerances& tol = default_tols());

struct SecurityReport {
    CodeRates rates;
    double security = 0.0;
    double reliability = 0.0;
    std::optional<double> leakage_exact;
    std::int64_t undecided = 0;

    std::string to_json() const;
};

SecurityReport make_security_report(const PolarPartition& p,
                                    std::optional<double> leakage = std::nullopt);

/// CSV: index,set,bob_upper_log2,eve_lower_log2 (index ascending, 1-based).
std::string partition_csv(const PolarPartition& p);

}  // namespace qpc
