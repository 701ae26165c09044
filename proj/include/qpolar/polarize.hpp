#pragma once

#include "qpolar/channels.hpp"
#include "qpolar/qmath.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qpc {

// --- channel combining ------------------------------------------------------

/// Worse channel W^-: rho^-_{u1} = 1/2 sum_{u2} rho_{u1^u2} (x) rho_{u2}.
CqChannel combine_minus(const CqChannel& w, const Tolerances& tol = default_tols());

/// Better channel W^+ with the classical register kept in front:
/// rho^+_{u2} = 1/2 sum_{u1} |u1><u1| (x) rho_{u1^u2} (x) rho_{u2}.
CqChannel combine_plus(const CqChannel& w, const Tolerances& tol = default_tols());

struct SynthesizedChannel {
    int n = 0;
    int index = 1;                 // 1-based i in [N]
    std::int64_t classical_dim = 1;  // 2^(i-1), leading register
    CqChannel channel;             // over U_1^{i-1} (x) B^N
};

/// Exact W_N^(i) by direct summation over prefixes and suffixes of the
/// encoding map. Register order: classical U registers first, then the N
/// B registers in channel order.
SynthesizedChannel synthesize(const CqChannel& w, int n, int index,
                              const Tolerances& tol = default_tols());

/// The same channel assembled by recursive minus/plus combining, with the
/// register interleaving applied at every level so the output follows the
/// same fixed convention as `synthesize`. Used to cross-check the recursion.
SynthesizedChannel synthesize_recursive(const CqChannel& w, int n, int index,
                                        const Tolerances& tol = default_tols());

// --- classical reduction ----------------------------------------------------

/// Two-row transition table over a shared outcome alphabet.
struct ClassicalTable {
    std::vector<double> p0;
    std::vector<double> p1;

    std::size_t size() const { return p0.size(); }
    double bhattacharyya() const;  // Z = sum_y sqrt(p0 p1)
};

struct ClassicalReduction {
    Matrix basis;  // columns: joint eigenbasis
    ClassicalTable table;
    double commutator_norm = 0.0;
};

/// Refusal carrying the commutator norm when the outputs do not commute.
struct NonCommutingError : DomainError {
    double commutator_norm;
    explicit NonCommutingError(double norm)
        : DomainError("channel outputs do not commute, ||[rho0,rho1]||_1 = " +
                      std::to_string(norm)),
          commutator_norm(norm) {}
};

/// Joint diagonalization when || [rho0, rho1] ||_1 <= tol.commuting.
ClassicalReduction classical_reduce(const CqChannel& w, const Tolerances& tol = default_tols());

/// Nothrow probe used by callers that fall back to bound mode.
std::optional<ClassicalReduction> try_classical_reduce(const CqChannel& w,
                                                       double* commutator_norm = nullptr,
                                                       const Tolerances& tol = default_tols());

// --- scalar evolution -------------------------------------------------------

enum class ScalarMode { exact_classical, fidelity_bounds };

/// Per-index tracker of sqrt(F), stored on the log2 scale so deep branches
/// never underflow silently. In exact mode lower == upper and the linear
/// value is kept as well.
struct ScalarTracker {
    double lower_log2 = 0.0;
    double upper_log2 = 0.0;
    std::optional<double> exact_value;

    double lower() const { return std::exp2(lower_log2); }
    double upper() const { return std::exp2(upper_log2); }
};

struct EvolveOptions {
    std::size_t alphabet_cap = 4096;  // exact-mode outcome alphabet per branch
    double merge_rel_tol = 1e-13;     // likelihood-ratio class merge tolerance
};

/// All 2^n trackers in index order (path = bits of i-1, most significant
/// first, 0 = minus). exact_classical propagates merged transition tables;
/// fidelity_bounds propagates interval bounds, with the sharper minus lower
/// bound used when the base channel commutes.
std::vector<ScalarTracker> evolve_scalar(const CqChannel& w, int n, ScalarMode mode,
                                         const EvolveOptions& opts = {},
                                         const Tolerances& tol = default_tols());

std::string path_string(int n, std::int64_t index);  // 1-based index -> "-+-..."

/// Deterministic CSV (n,index,path,lower_log2,upper_log2,exact_value), index
/// ascending.
std::string trajectory_csv(const std::vector<ScalarTracker>& trackers, int n);

struct PolarizationFractions {
    double good = 0.0;
    double poor = 0.0;
    double undecided = 0.0;
};

/// Thresholds 2^{-N^beta}: good when the sqrt(F) upper bound is strictly
/// below, poor when the lower bound is strictly above 1 - 2^{-N^beta}. Ties
/// count as neither.
PolarizationFractions polarization_fractions(const std::vector<ScalarTracker>& trackers, int n,
                                             double beta);

bool tracker_good(const ScalarTracker& t, int n, double beta);
bool tracker_poor(const ScalarTracker& t, int n, double beta);

// --- convergence-rate process ----------------------------------------------

struct ConvergenceConfig {
    double q = 2.0;
    double beta = 0.3;
    int n_max = 16;
    std::int64_t trials = 10000;
    std::uint64_t seed = 1;
};

struct ConvergenceEstimate {
    int n = 0;
    double probability = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// Monte Carlo over random -/+ paths of the extremal process
/// X_{n+1} = min(1, q X_n) or X_n^2, each with probability 1/2.
/// Estimates Pr{ X_n < 2^{-2^{n beta}} } with a Wilson 95% interval.
std::vector<ConvergenceEstimate> simulate_convergence(const ConvergenceConfig& cfg, double x0);

/// Channel-driven variant: the path follows the exact table recursion of W
/// and X_n = 1 - Z_n^2 (the substitution used for the Eve process).
std::vector<ConvergenceEstimate> simulate_convergence(const ConvergenceConfig& cfg,
                                                      const CqChannel& w,
                                                      const EvolveOptions& opts = {});

// --- pure-state invariance (minus transform) --------------------------------

struct PureInvarianceResult {
    double f_w = 0.0;
    double f_minus = 0.0;
    double gap = 0.0;
};

/// F(W) = |<psi0|psi1>|^2 against F(W^-) computed by Uhlmann maximization
/// over purifications of the rank-2 minus outputs.
PureInvarianceResult verify_pure_state_invariance(const PureState& psi0, const PureState& psi1,
                                                  const Tolerances& tol = default_tols());

}  // namespace qpc
