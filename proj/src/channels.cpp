#include "qpolar/channels.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace qpc {

using nlohmann::json;

CqChannel::CqChannel(DensityOperator r0, DensityOperator r1)
    : rho0(std::move(r0)), rho1(std::move(r1)) {
    if (rho0.dim() != rho1.dim())
        throw DimensionError("CqChannel: output dimensions differ");
}

void IsometricChannel::validate(const Tolerances& tol) const {
    if (dim_in <= 0 || dim_b <= 0 || dim_e <= 0)
        throw DimensionError("IsometricChannel: nonpositive dimension");
    if (isometry.rows() != dim_b * dim_e || isometry.cols() != dim_in)
        throw DimensionError("IsometricChannel: isometry shape mismatch");
    Matrix gram = isometry.adjoint() * isometry;
    if ((gram - Matrix::Identity(dim_in, dim_in)).cwiseAbs().maxCoeff() > tol.isometry)
        throw DomainError("IsometricChannel: V^dag V != I");
    if (static_cast<std::int64_t>(input_basis.size()) != dim_in)
        throw DimensionError("IsometricChannel: input basis size mismatch");
    for (std::size_t i = 0; i < input_basis.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            Complex g = input_basis[j].dot(input_basis[i]);
            double want = (i == j) ? 1.0 : 0.0;
            if (std::abs(g - want) > tol.isometry)
                throw DomainError("IsometricChannel: input basis not orthonormal");
        }
}

void DegradingMap::validate(const Tolerances& tol) const {
    if (kraus.empty()) throw DimensionError("DegradingMap: no Kraus operators");
    const auto rows = kraus.front().rows();
    const auto cols = kraus.front().cols();
    Matrix acc = Matrix::Zero(cols, cols);
    for (const auto& k : kraus) {
        if (k.rows() != rows || k.cols() != cols)
            throw DimensionError("DegradingMap: inconsistent Kraus shapes");
        acc += k.adjoint() * k;
    }
    if ((acc - Matrix::Identity(cols, cols)).cwiseAbs().maxCoeff() > tol.isometry)
        throw DomainError("DegradingMap: Kraus completeness violated");
}

Matrix DegradingMap::apply(const Matrix& rho) const {
    Matrix out = Matrix::Zero(kraus.front().rows(), kraus.front().rows());
    for (const auto& k : kraus) out += k * rho * k.adjoint();
    return out;
}

std::string ChannelSpec::family_name() const {
    switch (family) {
        case Family::amplitude_damping: return "amplitude_damping";
        case Family::photon_detected_jump: return "photon_detected_jump";
        case Family::erasure: return "erasure";
        case Family::dephasing: return "dephasing";
        case Family::cloning: return "cloning";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "amplitude_damping") return Family::amplitude_damping;
    if (name == "photon_detected_jump") return Family::photon_detected_jump;
    if (name == "erasure") return Family::erasure;
    if (name == "dephasing") return Family::dephasing;
    if (name == "cloning") return Family::cloning;
    throw DomainError("unknown channel family: " + name);
}

std::string ChannelSpec::to_json() const {
    json j;
    j["family"] = family_name();
    if (family == Family::cloning) {
        j["clones"] = clones;
    } else {
        j["parameter"] = parameter;
    }
    if (family == Family::dephasing) {
        j["dephasing_axis"] = dephasing_axis == PauliAxis::X   ? "X"
                              : dephasing_axis == PauliAxis::Y ? "Y"
                                                               : "Z";
    }
    return j.dump();
}

ChannelSpec ChannelSpec::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DomainError(std::string("channel spec: invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw DomainError("channel spec: missing \"family\"");
    ChannelSpec spec;
    spec.family = family_from_name(j["family"].get<std::string>());
    if (spec.family == Family::cloning) {
        if (!j.contains("clones") || !j["clones"].is_number_integer())
            throw DomainError("channel spec: cloning needs integer \"clones\"");
        spec.clones = j["clones"].get<int>();
        if (spec.clones < 2) throw DomainError("channel spec: clones must be >= 2");
    } else {
        if (!j.contains("parameter") || !j["parameter"].is_number())
            throw DomainError("channel spec: missing numeric \"parameter\"");
        spec.parameter = j["parameter"].get<double>();
        if (!(spec.parameter >= 0.0 && spec.parameter <= 1.0))
            throw DomainError("channel spec: parameter must lie in [0,1]");
    }
    if (spec.family == Family::dephasing && j.contains("dephasing_axis")) {
        const std::string a = j["dephasing_axis"].get<std::string>();
        if (a == "X")
            spec.dephasing_axis = PauliAxis::X;
        else if (a == "Y")
            spec.dephasing_axis = PauliAxis::Y;
        else if (a == "Z")
            spec.dephasing_axis = PauliAxis::Z;
        else
            throw DomainError("channel spec: dephasing_axis must be X, Y or Z");
    }
    return spec;
}

bool ChannelSpec::degradable() const {
    switch (family) {
        case Family::amplitude_damping:
        case Family::photon_detected_jump:
            return parameter < 0.5;
        case Family::erasure:
            return parameter <= 0.5;
        case Family::dephasing:
        case Family::cloning:
            return true;
    }
    return false;
}

namespace {

Vector ket(std::int64_t d, std::int64_t i) {
    Vector v = Vector::Zero(d);
    v[i] = 1.0;
    return v;
}

// |b>_B (x) |e>_E packed with B major
std::int64_t be_index(std::int64_t b, std::int64_t e, std::int64_t dim_e) {
    return b * dim_e + e;
}

Matrix pauli(PauliAxis axis) {
    Matrix m(2, 2);
    switch (axis) {
        case PauliAxis::X:
            m << 0, 1, 1, 0;
            break;
        case PauliAxis::Y:
            m << 0, Complex(0, -1), Complex(0, 1), 0;
            break;
        case PauliAxis::Z:
            m << 1, 0, 0, -1;
            break;
    }
    return m;
}

}  // namespace

IsometricChannel build_channel(const ChannelSpec& spec, const Tolerances& tol) {
    IsometricChannel ch;
    ch.dim_in = 2;
    const double g = spec.parameter;
    if (spec.family != Family::cloning && !(g >= 0.0 && g <= 1.0))
        throw DomainError("build_channel: parameter out of [0,1]");

    switch (spec.family) {
        case Family::amplitude_damping: {
            // |0> -> |0>|0>;  |1> -> sqrt(1-g)|1>|0> + sqrt(g)|0>|1>
            ch.dim_b = 2;
            ch.dim_e = 2;
            Matrix v = Matrix::Zero(4, 2);
            v(be_index(0, 0, 2), 0) = 1.0;
            v(be_index(1, 0, 2), 1) = std::sqrt(1.0 - g);
            v(be_index(0, 1, 2), 1) = std::sqrt(g);
            ch.isometry = v;
            ch.input_basis = {ket(2, 0), ket(2, 1)};
            break;
        }
        case Family::photon_detected_jump: {
            // Complement-first construction: Eve records whether the jump
            // fired, Bob keeps the undamped level structure. Minimal Bob
            // space is 3-dimensional.
            ch.dim_b = 3;
            ch.dim_e = 2;
            Matrix v = Matrix::Zero(6, 2);
            v(be_index(0, 0, 2), 0) = 1.0;
            v(be_index(1, 0, 2), 1) = std::sqrt(1.0 - g);
            v(be_index(2, 1, 2), 1) = std::sqrt(g);
            ch.isometry = v;
            ch.input_basis = {ket(2, 0), ket(2, 1)};
            break;
        }
        case Family::erasure: {
            // dim 3 on both sides: qubit levels 0,1 plus flag |e> = |2>
            ch.dim_b = 3;
            ch.dim_e = 3;
            Matrix v = Matrix::Zero(9, 2);
            for (std::int64_t x = 0; x < 2; ++x) {
                v(be_index(x, 2, 3), x) = std::sqrt(1.0 - g);
                v(be_index(2, x, 3), x) = std::sqrt(g);
            }
            ch.isometry = v;
            ch.input_basis = {ket(2, 0), ket(2, 1)};
            break;
        }
        case Family::dephasing: {
            // V|psi> = sqrt(1-p)|psi>|0> + sqrt(p) (sigma|psi>)|1>; the input
            // basis is the one sigma bit-flips, which makes Eve classical.
            ch.dim_b = 2;
            ch.dim_e = 2;
            const Matrix sig = pauli(spec.dephasing_axis);
            Matrix v = Matrix::Zero(4, 2);
            for (std::int64_t x = 0; x < 2; ++x) {
                Vector in = ket(2, x);
                Vector flipped = sig * in;
                for (std::int64_t b = 0; b < 2; ++b) {
                    v(be_index(b, 0, 2), x) += std::sqrt(1.0 - g) * in[b];
                    v(be_index(b, 1, 2), x) += std::sqrt(g) * flipped[b];
                }
            }
            ch.isometry = v;
            if (spec.dephasing_axis == PauliAxis::Z) {
                Vector plus = (ket(2, 0) + ket(2, 1)) / std::sqrt(2.0);
                Vector minus = (ket(2, 0) - ket(2, 1)) / std::sqrt(2.0);
                ch.input_basis = {plus, minus};
            } else {
                ch.input_basis = {ket(2, 0), ket(2, 1)};
            }
            break;
        }
        case Family::cloning: {
            // Environment states from the covariant cloner; Bob side is the
            // purifying register with disjoint supports for the two inputs.
            const int nc = spec.clones;
            if (nc < 2) throw DomainError("build_channel: clones must be >= 2");
            const double delta = nc * (nc + 1) / 2.0;
            ch.dim_b = 2 * nc;
            ch.dim_e = nc;
            Matrix v = Matrix::Zero(ch.dim_b * ch.dim_e, 2);
            for (int i = 0; i < nc; ++i) {
                v(be_index(i, i, nc), 0) = std::sqrt((i + 1) / delta);
                v(be_index(nc + i, i, nc), 1) = std::sqrt((nc - i) / delta);
            }
            ch.isometry = v;
            ch.input_basis = {ket(2, 0), ket(2, 1)};
            break;
        }
    }
    ch.validate(tol);
    return ch;
}

namespace {

DensityOperator channel_output(const IsometricChannel& ch, std::int64_t x, bool bob) {
    const Vector out = ch.isometry * ch.input_basis[x];
    const Matrix full = out * out.adjoint();
    std::vector<std::int64_t> dims{ch.dim_b, ch.dim_e};
    std::vector<std::int64_t> keep{bob ? std::int64_t(0) : std::int64_t(1)};
    return DensityOperator(partial_trace(full, dims, keep), DensityOperator::Trust::Trusted);
}

}  // namespace

CqChannel bob_channel(const IsometricChannel& ch) {
    return CqChannel(channel_output(ch, 0, true), channel_output(ch, 1, true));
}

CqChannel eve_channel(const IsometricChannel& ch) {
    return CqChannel(channel_output(ch, 0, false), channel_output(ch, 1, false));
}

double check_classical_environment(const IsometricChannel& ch) {
    const CqChannel we = eve_channel(ch);
    const Matrix a = we.rho0.matrix() * we.rho1.matrix();
    return trace_norm(a - a.adjoint());
}

double verify_degrading_map(const CqChannel& w, const CqChannel& wstar, const DegradingMap& d,
                            const Tolerances& tol) {
    d.validate(tol);
    if (d.kraus.front().cols() != w.dim() || d.kraus.front().rows() != wstar.dim())
        throw DimensionError("verify_degrading_map: Kraus dims incompatible with channels");
    const double d0 = trace_norm(d.apply(w.rho0.matrix()) - wstar.rho0.matrix());
    const double d1 = trace_norm(d.apply(w.rho1.matrix()) - wstar.rho1.matrix());
    return std::max(d0, d1);
}

double symmetric_holevo(const CqChannel& w) {
    DensityOperator avg((w.rho0.matrix() + w.rho1.matrix()) / 2.0,
                        DensityOperator::Trust::Trusted);
    return von_neumann_entropy(avg) -
           0.5 * (von_neumann_entropy(w.rho0) + von_neumann_entropy(w.rho1));
}

double symmetric_coherent_info(const IsometricChannel& ch, const Tolerances& tol) {
    const double holevo_route =
        symmetric_holevo(bob_channel(ch)) - symmetric_holevo(eve_channel(ch));

    // Bell-input route: H(B) - H(AB) with half of a maximally entangled state
    // through the channel; H(AB) = H(E) for the isometric extension.
    const std::int64_t dbe = ch.dim_b * ch.dim_e;
    Vector joint = Vector::Zero(2 * dbe);
    for (std::int64_t x = 0; x < 2; ++x)
        joint.segment(x * dbe, dbe) = (ch.isometry * ch.input_basis[x]) / std::sqrt(2.0);
    const Matrix full = joint * joint.adjoint();
    std::vector<std::int64_t> dims{2, ch.dim_b, ch.dim_e};
    DensityOperator rho_b(partial_trace(full, dims, {1}), DensityOperator::Trust::Trusted);
    DensityOperator rho_ab(partial_trace(full, dims, {0, 1}), DensityOperator::Trust::Trusted);
    const double bell_route = von_neumann_entropy(rho_b) - von_neumann_entropy(rho_ab);

    if (std::abs(holevo_route - bell_route) > 1e-8)
        throw DomainError("symmetric_coherent_info: cross-check failed, |" +
                          std::to_string(holevo_route) + " - " + std::to_string(bell_route) +
                          "| > 1e-8");
    (void)tol;
    return holevo_route;
}

double coherent_info_diagonal(const IsometricChannel& ch, double p) {
    const CqChannel wb = bob_channel(ch);
    const CqChannel we = eve_channel(ch);
    DensityOperator b((1.0 - p) * wb.rho0.matrix() + p * wb.rho1.matrix(),
                      DensityOperator::Trust::Trusted);
    DensityOperator e((1.0 - p) * we.rho0.matrix() + p * we.rho1.matrix(),
                      DensityOperator::Trust::Trusted);
    return von_neumann_entropy(b) - von_neumann_entropy(e);
}

double quantum_capacity_degradable(const ChannelSpec& spec, const Tolerances& tol) {
    if (!spec.degradable()) {
        std::string range = (spec.family == Family::erasure) ? "[0, 0.5]" : "[0, 0.5)";
        throw DomainError("quantum_capacity_degradable: " + spec.family_name() +
                          " is only degradable for parameter in " + range);
    }
    const IsometricChannel ch = build_channel(spec, tol);
    const CqChannel wb = bob_channel(ch);
    const CqChannel we = eve_channel(ch);
    auto ic = [&](double p) {
        DensityOperator b((1.0 - p) * wb.rho0.matrix() + p * wb.rho1.matrix(),
                          DensityOperator::Trust::Trusted);
        DensityOperator e((1.0 - p) * we.rho0.matrix() + p * we.rho1.matrix(),
                          DensityOperator::Trust::Trusted);
        return von_neumann_entropy(b) - von_neumann_entropy(e);
    };

    const int grid_points = 10000;
    double best_p = 0.0, best = -1e300;
    for (int i = 0; i <= grid_points; ++i) {
        const double p = static_cast<double>(i) / grid_points;
        const double v = ic(p);
        if (v > best) {
            best = v;
            best_p = p;
        }
    }

    // golden-section refinement around the grid optimum
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::max(0.0, best_p - 1.0 / grid_points);
    double hi = std::min(1.0, best_p + 1.0 / grid_points);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = ic(x1), f2 = ic(x2);
    while (hi - lo > 1e-9) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = ic(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = ic(x1);
        }
    }
    return std::max({best, f1, f2});
}

std::vector<CapacityRow> capacity_ratio_curve(Family family, const std::vector<double>& grid,
                                              const Tolerances& tol) {
    std::vector<CapacityRow> rows;
    rows.reserve(grid.size());
    for (double p : grid) {
        CapacityRow row;
        row.parameter = p;
        ChannelSpec spec;
        spec.family = family;
        if (family == Family::cloning) {
            spec.clones = static_cast<int>(p);
        } else {
            spec.parameter = p;
        }
        if (!spec.degradable()) {
            row.flagged = true;
            rows.push_back(row);
            continue;
        }
        row.ic_sym = symmetric_coherent_info(build_channel(spec, tol), tol);
        row.q_true = quantum_capacity_degradable(spec, tol);
        if (row.ic_sym <= 0.0) {
            row.flagged = true;
        } else {
            row.ratio = row.q_true / row.ic_sym;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qpc
