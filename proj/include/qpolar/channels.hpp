#pragma once

#include "qpolar/qmath.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qpc {

/// Binary classical input, quantum output: x -> rho_x.
struct CqChannel {
    DensityOperator rho0;
    DensityOperator rho1;

    CqChannel(DensityOperator r0, DensityOperator r1);
    std::int64_t dim() const { return rho0.dim(); }
};

/// Isometric extension of a qubit-input channel. The isometry maps the input
/// space into B (x) E, with B the major factor. `input_basis` is the
/// orthonormal input basis in which the environment outputs commute.
struct IsometricChannel {
    std::int64_t dim_in = 0;
    std::int64_t dim_b = 0;
    std::int64_t dim_e = 0;
    Matrix isometry;                  // (dim_b * dim_e) x dim_in
    std::vector<Vector> input_basis;  // dim_in orthonormal kets

    void validate(const Tolerances& tol = default_tols()) const;
};

struct DegradingMap {
    std::vector<Matrix> kraus;  // each dim_e_out x dim_b_in

    void validate(const Tolerances& tol = default_tols()) const;
    Matrix apply(const Matrix& rho) const;
};

enum class Family {
    amplitude_damping,
    photon_detected_jump,
    erasure,
    dephasing,
    cloning,
};

enum class PauliAxis { X, Y, Z };

struct ChannelSpec {
    Family family = Family::amplitude_damping;
    double parameter = 0.0;       // gamma / gamma / epsilon / p
    int clones = 2;               // cloning only
    PauliAxis dephasing_axis = PauliAxis::Z;

    std::string to_json() const;
    static ChannelSpec from_json(const std::string& text);

    /// True when the single-letter coherent-information maximum is the
    /// quantum capacity (AD/PDJ below 1/2, erasure up to 1/2, rest always).
    bool degradable() const;
    std::string family_name() const;
};

Family family_from_name(const std::string& name);

IsometricChannel build_channel(const ChannelSpec& spec, const Tolerances& tol = default_tols());

CqChannel bob_channel(const IsometricChannel& ch);
CqChannel eve_channel(const IsometricChannel& ch);

/// || [rho0^E, rho1^E] ||_1; <= tol.commuting certifies a classical environment.
double check_classical_environment(const IsometricChannel& ch);

/// max_x || D(rho_x^B) - rho_x^E ||_1.
double verify_degrading_map(const CqChannel& w, const CqChannel& wstar, const DegradingMap& d,
                            const Tolerances& tol = default_tols());

/// I(W) = H((rho0+rho1)/2) - (H(rho0)+H(rho1))/2, bits.
double symmetric_holevo(const CqChannel& w);

/// I(W) - I(W*), cross-checked against the Bell-input entropy difference.
double symmetric_coherent_info(const IsometricChannel& ch, const Tolerances& tol = default_tols());

/// Coherent information for the diagonal input prior (1-p, p) in input_basis.
double coherent_info_diagonal(const IsometricChannel& ch, double p);

/// max over the diagonal prior of the coherent information; the capacity for
/// the degradable families handled here. Grid scan then golden-section
/// refinement to 1e-9 on the prior.
double quantum_capacity_degradable(const ChannelSpec& spec, const Tolerances& tol = default_tols());

struct CapacityRow {
    double parameter = 0.0;
    double q_true = 0.0;
    double ic_sym = 0.0;
    std::optional<double> ratio;  // empty when flagged
    bool flagged = false;         // out of degradable range or ic_sym <= 0
};

std::vector<CapacityRow> capacity_ratio_curve(Family family, const std::vector<double>& grid,
                                              const Tolerances& tol = default_tols());

}  // namespace qpc
