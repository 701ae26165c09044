#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qpc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Central numeric configuration. Every tolerance used by the library lives
/// here so that a single record controls validation and comparison behavior.
struct Tolerances {
    double hermiticity = 1e-12;   // max |M - M^dag| entry
    double trace_one = 1e-10;     // |Tr(rho) - 1|
    double psd_floor = -1e-10;    // eigenvalues in [psd_floor, 0) are clamped to 0
    double unit_norm = 1e-10;     // pure-state norm slack
    double isometry = 1e-10;      // |V^dag V - I| entry
    double commuting = 1e-12;     // trace-norm threshold for "classical"
    double rank_cut = 1e-12;      // singular values below rank_cut * s_max are rank-deficient
    std::int64_t dim_cap = 4096;          // refuse operators larger than this
    std::int64_t entries_cap = 1 << 24;   // refuse tensor results with more entries
};

const Tolerances& default_tols();

struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Hermitian, PSD, unit-trace operator. Construction validates unless the
/// Trusted tag is passed (used on hot paths that produce valid states by
/// construction; tests re-validate those).
class DensityOperator {
public:
    enum class Trust { Checked, Trusted };

    explicit DensityOperator(Matrix m, Trust trust = Trust::Checked,
                             const Tolerances& tol = default_tols());

    std::int64_t dim() const { return mat_.rows(); }
    const Matrix& matrix() const { return mat_; }

private:
    Matrix mat_;
};

/// Unit-norm state vector.
class PureState {
public:
    explicit PureState(Vector amps, const Tolerances& tol = default_tols());

    std::int64_t dim() const { return amps_.size(); }
    const Vector& amplitudes() const { return amps_; }

private:
    Vector amps_;
};

// --- linear algebra --------------------------------------------------------

Matrix tensor(const Matrix& a, const Matrix& b, const Tolerances& tol = default_tols());
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b,
                       const Tolerances& tol = default_tols());

/// Reduced operator on the kept subsystems (`keep` holds ascending indices
/// into `dims`); subsystem order of the result follows `keep`.
Matrix partial_trace(const Matrix& m, const std::vector<std::int64_t>& dims,
                     const std::vector<std::int64_t>& keep);
DensityOperator partial_trace(const DensityOperator& op, const std::vector<std::int64_t>& dims,
                              const std::vector<std::int64_t>& keep);

/// Hermitian principal square root; eigenvalues in [psd_floor, 0) clamp to 0.
Matrix matrix_sqrt(const Matrix& herm, const Tolerances& tol = default_tols());

/// Sum of singular values.
double trace_norm(const Matrix& m);

/// || sqrt(rho) sqrt(sigma) ||_1^2, in [0,1].
double fidelity(const DensityOperator& rho, const DensityOperator& sigma,
                const Tolerances& tol = default_tols());

/// -Tr(rho log2 rho), bits.
double von_neumann_entropy(const DensityOperator& rho, const Tolerances& tol = default_tols());

/// || rho - sigma ||_1, in [0,2].
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

struct UhlmannResult {
    Matrix isometry;        // unitary on the acting side
    double overlap;         // achieved squared overlap |<phi|(V (x) I)|psi>|^2
};

/// Unitary on `acting_side` of the (dims[0], dims[1]) bipartition maximizing
/// the squared overlap between (V on acting side)|psi> and |phi>. Rank-null
/// directions are completed by ordered Gram-Schmidt against the standard
/// basis, so results are deterministic across runs.
UhlmannResult uhlmann_isometry(const PureState& psi, const PureState& phi,
                               const std::vector<std::int64_t>& dims, int acting_side,
                               const Tolerances& tol = default_tols());

/// Eigenvalues of a Hermitian matrix, ascending, with PSD clamping applied.
std::vector<double> hermitian_eigenvalues(const Matrix& herm, const Tolerances& tol = default_tols());

double binary_entropy(double p);

// --- state-vector register tools ---------------------------------------------

/// Reorder tensor factors of a state vector: dims[k] is the size of register
/// k (row-major), order[j] names the register placed at slot j of the result.
Vector permute_registers(const Vector& state, const std::vector<std::int64_t>& dims,
                         const std::vector<std::size_t>& order);

/// Apply a (rows x cols) matrix to one register of a state vector, resizing
/// that register from `cols` to `rows`.
Vector apply_to_register(const Vector& state, const std::vector<std::int64_t>& dims,
                         std::size_t target, const Matrix& op);

/// Partial trace of |state><state| keeping the listed registers.
Matrix reduced_state(const Vector& state, const std::vector<std::int64_t>& dims,
                     const std::vector<std::int64_t>& keep);

}  // namespace qpc
