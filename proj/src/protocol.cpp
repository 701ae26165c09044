#include "qpolar/protocol.hpp"

#include "qpolar/encoding.hpp"
#include "qpolar/report.hpp"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qpc {

using nlohmann::json;

Matrix decoder_cascade_operator(const HelstromCascade& cascade, const DecodeLayout& layout,
                                const BitVec& u) {
    const std::int64_t big_n = std::int64_t(1) << cascade.level();
    if (static_cast<std::int64_t>(u.size()) != big_n ||
        static_cast<std::int64_t>(layout.size()) != big_n)
        throw DimensionError("decoder_cascade_operator: length mismatch");
    Matrix m = Matrix::Identity(cascade.dim(), cascade.dim());
    std::uint64_t prefix = 0;
    for (std::int64_t i = 0; i < big_n; ++i) {
        if (!layout.pinned[i]) {
            const auto& proj = cascade.projector(static_cast<int>(i), prefix);
            const Matrix pm = proj.pos_columns * (proj.pos_columns.adjoint() * m);
            m = (u[i] == 0) ? pm : Matrix(m - pm);
        }
        prefix = (prefix << 1) | u[i];
    }
    return m;
}

namespace {

struct Ctx {
    const IsometricChannel* ch = nullptr;
    const WiretapCode* code = nullptr;
    int n = 0;
    std::int64_t big_n = 0;
    std::vector<std::int64_t> a_idx, b_idx, x_idx, y_idx;
    std::int64_t na = 0, nb = 0, nx = 0, ny = 0;
    std::int64_t dim_a = 1, dim_x = 1, dim_y = 1;  // 2^na, 2^nx, 2^ny
    std::int64_t d_be = 1, dm_b = 1, dm_e = 1;
    std::vector<Vector> codeword_be;  // per input pattern: (x)V|x_j>, B-major split layout
};

/// Bits packed with the first member index as the most significant bit.
BitVec unpack(std::uint64_t v, std::int64_t count) {
    BitVec out(count);
    for (std::int64_t k = 0; k < count; ++k) out[k] = (v >> (count - 1 - k)) & 1;
    return out;
}

Ctx make_ctx(const IsometricChannel& ch, const WiretapCode& code, const Tolerances& tol) {
    Ctx ctx;
    ctx.ch = &ch;
    ctx.code = &code;
    ctx.n = code.partition.n;
    ctx.big_n = code.partition.size();
    if (ctx.n > 3) throw ResourceError("coherent protocol: blocklength above the exact cap");
    ctx.a_idx = code.partition.members(SetLabel::A);
    ctx.b_idx = code.partition.members(SetLabel::B);
    ctx.x_idx = code.partition.members(SetLabel::X);
    ctx.y_idx = code.partition.members(SetLabel::Y);
    ctx.na = ctx.a_idx.size();
    ctx.nb = ctx.b_idx.size();
    ctx.nx = ctx.x_idx.size();
    ctx.ny = ctx.y_idx.size();
    ctx.dim_a = std::int64_t(1) << ctx.na;
    ctx.dim_x = std::int64_t(1) << ctx.nx;
    ctx.dim_y = std::int64_t(1) << ctx.ny;
    for (std::int64_t j = 0; j < ctx.big_n; ++j) {
        ctx.d_be *= ch.dim_b * ch.dim_e;
        ctx.dm_b *= ch.dim_b;
        ctx.dm_e *= ch.dim_e;
    }
    const std::int64_t out_entries = ctx.dim_a * ctx.d_be * ctx.dim_x * ctx.dim_a * ctx.dim_y;
    if (out_entries > tol.entries_cap)
        throw ResourceError("coherent protocol: state of " + std::to_string(out_entries) +
                            " amplitudes exceeds cap");

    // channel output components per input pattern, registers regrouped from
    // (B1 E1 ... BN EN) to (B1..BN E1..EN)
    std::vector<std::int64_t> inter_dims;
    std::vector<std::size_t> order;
    for (std::int64_t j = 0; j < ctx.big_n; ++j) {
        inter_dims.push_back(ch.dim_b);
        inter_dims.push_back(ch.dim_e);
    }
    for (std::int64_t j = 0; j < ctx.big_n; ++j) order.push_back(2 * j);
    for (std::int64_t j = 0; j < ctx.big_n; ++j) order.push_back(2 * j + 1);

    ctx.codeword_be.resize(std::size_t(1) << ctx.big_n);
    for (std::uint64_t pattern = 0; pattern < ctx.codeword_be.size(); ++pattern) {
        const BitVec u = unpack(pattern, ctx.big_n);
        const BitVec x = polar_encode(u);
        Vector comp = Vector::Ones(1);
        for (std::int64_t j = 0; j < ctx.big_n; ++j) {
            const Vector vj = ch.isometry * ch.input_basis[x[j]];
            comp = tensor(Matrix(comp), Matrix(vj), tol).col(0);
        }
        ctx.codeword_be[pattern] = permute_registers(comp, inter_dims, order);
    }
    return ctx;
}

std::uint64_t pack_pattern(const Ctx& ctx, std::uint64_t ua, std::uint64_t uy, std::uint64_t ux) {
    BitVec info = unpack(ua, ctx.na);
    BitVec rnd = unpack(uy, ctx.ny);
    WiretapCode scratch = *ctx.code;
    for (std::int64_t k = 0; k < ctx.nx; ++k) scratch.key[k] = (ux >> (ctx.nx - 1 - k)) & 1;
    const BitVec u = scratch.assemble(info, rnd);
    std::uint64_t pattern = 0;
    for (auto bit : u) pattern = (pattern << 1) | bit;
    return pattern;
}

/// State after encode + channel, layout [A_hat, B^N, E^N, X_B]. A fixed u_Y
/// restricts the Y branch to a basis value.
Vector channel_output_state(const Ctx& ctx, const std::vector<double>& gamma,
                            std::optional<std::uint64_t> fixed_uy) {
    const std::int64_t total = ctx.dim_a * ctx.d_be * ctx.dim_x;
    Vector state = Vector::Zero(total);
    const std::int64_t y_count = fixed_uy ? 1 : ctx.dim_y;
    const double amp = 1.0 / std::sqrt(static_cast<double>(ctx.dim_a * y_count * ctx.dim_x));
    for (std::int64_t ua = 0; ua < ctx.dim_a; ++ua)
        for (std::int64_t yi = 0; yi < y_count; ++yi) {
            const std::uint64_t uy = fixed_uy ? *fixed_uy : static_cast<std::uint64_t>(yi);
            const Complex phase = std::polar(amp, gamma.empty() ? 0.0 : gamma[uy]);
            for (std::int64_t ux = 0; ux < ctx.dim_x; ++ux) {
                const Vector& comp = ctx.codeword_be[pack_pattern(ctx, ua, uy, ux)];
                for (std::int64_t be = 0; be < ctx.d_be; ++be) {
                    if (comp[be] == Complex(0, 0)) continue;
                    state[(ua * ctx.d_be + be) * ctx.dim_x + ux] += phase * comp[be];
                }
            }
        }
    return state;
}

/// Coherent measurement cascade: appends the outcome registers, producing
/// layout [A_hat, B^N, E^N, X_B, outcome_A, outcome_Y].
Vector apply_coherent_decoder(const Ctx& ctx, const HelstromCascade& cascade,
                              const Vector& state) {
    const std::int64_t in_total = ctx.dim_a * ctx.d_be * ctx.dim_x;
    if (state.size() != in_total) throw DimensionError("coherent decoder: state size mismatch");
    Vector out = Vector::Zero(in_total * ctx.dim_a * ctx.dim_y);

    DecodeLayout layout = DecodeLayout::from_code(*ctx.code);
    for (std::int64_t ux = 0; ux < ctx.dim_x; ++ux) {
        for (std::int64_t k = 0; k < ctx.nx; ++k)
            layout.pinned[ctx.x_idx[k]] = static_cast<std::uint8_t>((ux >> (ctx.nx - 1 - k)) & 1);
        for (std::int64_t oa = 0; oa < ctx.dim_a; ++oa)
            for (std::int64_t oy = 0; oy < ctx.dim_y; ++oy) {
                // full bit pattern for the cascade path
                WiretapCode scratch = *ctx.code;
                for (std::int64_t k = 0; k < ctx.nx; ++k)
                    scratch.key[k] = (ux >> (ctx.nx - 1 - k)) & 1;
                const BitVec u = scratch.assemble(unpack(oa, ctx.na), unpack(oy, ctx.ny));
                const Matrix m = decoder_cascade_operator(cascade, layout, u);
                // apply on the B^N register of the u_X slice
                for (std::int64_t a0 = 0; a0 < ctx.dim_a; ++a0)
                    for (std::int64_t bp = 0; bp < ctx.dm_b; ++bp) {
                        for (std::int64_t b = 0; b < ctx.dm_b; ++b) {
                            if (m(bp, b) == Complex(0, 0)) continue;
                            const Complex coef = m(bp, b);
                            for (std::int64_t e = 0; e < ctx.dm_e; ++e) {
                                const Complex v =
                                    state[((a0 * ctx.dm_b + b) * ctx.dm_e + e) * ctx.dim_x + ux];
                                if (v == Complex(0, 0)) continue;
                                const std::int64_t base =
                                    ((a0 * ctx.dm_b + bp) * ctx.dm_e + e) * ctx.dim_x + ux;
                                out[(base * ctx.dim_a + oa) * ctx.dim_y + oy] += coef * v;
                            }
                        }
                    }
            }
    }
    return out;
}

/// Reference detected state in the same layout as the decoder output.
Vector detected_state(const Ctx& ctx, const std::vector<double>& delta,
                      std::optional<std::uint64_t> fixed_uy) {
    const std::int64_t total = ctx.dim_a * ctx.d_be * ctx.dim_x * ctx.dim_a * ctx.dim_y;
    Vector state = Vector::Zero(total);
    const std::int64_t y_count = fixed_uy ? 1 : ctx.dim_y;
    const double amp = 1.0 / std::sqrt(static_cast<double>(ctx.dim_a * y_count * ctx.dim_x));
    for (std::int64_t ua = 0; ua < ctx.dim_a; ++ua)
        for (std::int64_t yi = 0; yi < y_count; ++yi) {
            const std::uint64_t uy = fixed_uy ? *fixed_uy : static_cast<std::uint64_t>(yi);
            const Complex phase = std::polar(amp, delta.empty() ? 0.0 : delta[uy]);
            for (std::int64_t ux = 0; ux < ctx.dim_x; ++ux) {
                const Vector& comp = ctx.codeword_be[pack_pattern(ctx, ua, uy, ux)];
                for (std::int64_t be = 0; be < ctx.d_be; ++be) {
                    if (comp[be] == Complex(0, 0)) continue;
                    const std::int64_t base = (ua * ctx.d_be + be) * ctx.dim_x + ux;
                    state[(base * ctx.dim_a + ua) * ctx.dim_y + static_cast<std::int64_t>(uy)] +=
                        phase * comp[be];
                }
            }
        }
    return state;
}

/// Branch state for one u_A in the bipartite layout [(B^N, X_B, outcome_Y), E^N].
Vector detected_branch(const Ctx& ctx, const std::vector<double>& delta, std::int64_t ua) {
    const std::int64_t dim_bob = ctx.dm_b * ctx.dim_x * ctx.dim_y;
    Vector state = Vector::Zero(dim_bob * ctx.dm_e);
    const double amp = 1.0 / std::sqrt(static_cast<double>(ctx.dim_y * ctx.dim_x));
    for (std::int64_t uy = 0; uy < ctx.dim_y; ++uy) {
        const Complex phase = std::polar(amp, delta.empty() ? 0.0 : delta[uy]);
        for (std::int64_t ux = 0; ux < ctx.dim_x; ++ux) {
            const Vector& comp = ctx.codeword_be[pack_pattern(
                ctx, static_cast<std::uint64_t>(ua), static_cast<std::uint64_t>(uy),
                static_cast<std::uint64_t>(ux))];
            for (std::int64_t b = 0; b < ctx.dm_b; ++b)
                for (std::int64_t e = 0; e < ctx.dm_e; ++e) {
                    const Complex v = comp[b * ctx.dm_e + e];
                    if (v == Complex(0, 0)) continue;
                    state[(((b * ctx.dim_x + ux) * ctx.dim_y + uy) * ctx.dm_e) + e] += phase * v;
                }
        }
    }
    const double norm = state.norm();
    if (norm > 0) state /= norm;
    return state;
}

}  // namespace

PhaseAssignment select_phases(const IsometricChannel& ch, const WiretapCode& code,
                              const Tolerances& tol) {
    Ctx ctx = make_ctx(ch, code, tol);
    if (ctx.ny > 6) throw ResourceError("select_phases: too many randomized branches");
    HelstromCascade cascade(bob_channel(ch), ctx.n, tol);

    PhaseAssignment phases;
    phases.gamma.assign(ctx.dim_y, 0.0);
    phases.delta.assign(ctx.dim_y, 0.0);
    Complex mean_t = 0;
    double mean_mod = 0;
    for (std::int64_t uy = 0; uy < ctx.dim_y; ++uy) {
        const Vector chi = apply_coherent_decoder(
            ctx, cascade, channel_output_state(ctx, {}, static_cast<std::uint64_t>(uy)));
        const Vector phi = detected_state(ctx, {}, static_cast<std::uint64_t>(uy));
        const Complex t = phi.dot(chi);
        phases.delta[uy] = std::abs(t) > 1e-15 ? std::arg(t) : 0.0;
        mean_t += t / static_cast<double>(ctx.dim_y);
        mean_mod += std::abs(t) / static_cast<double>(ctx.dim_y);
    }
    phases.aligned_average = mean_mod;
    phases.unaligned_average = std::abs(mean_t);
    return phases;
}

ProtocolTrace run_coherent_protocol(const IsometricChannel& ch, const WiretapCode& code,
                                    const PhaseAssignment& phases, const Tolerances& tol) {
    Ctx ctx = make_ctx(ch, code, tol);
    HelstromCascade cascade(bob_channel(ch), ctx.n, tol);

    std::vector<double> gamma = phases.gamma, delta = phases.delta;
    if (gamma.empty()) gamma.assign(ctx.dim_y, 0.0);
    if (delta.empty()) delta.assign(ctx.dim_y, 0.0);
    if (static_cast<std::int64_t>(gamma.size()) != ctx.dim_y ||
        static_cast<std::int64_t>(delta.size()) != ctx.dim_y)
        throw DimensionError("run_coherent_protocol: phase table size mismatch");

    // encode, transmit, decode coherently
    const Vector actual =
        apply_coherent_decoder(ctx, cascade, channel_output_state(ctx, gamma, std::nullopt));
    const Vector detected = detected_state(ctx, delta, std::nullopt);
    const double overlap = std::abs(detected.dot(actual));

    // decoupling isometries from the detected branches against a fixed
    // purification of the u_A-averaged environment state
    const std::vector<std::int64_t> dims{ctx.dim_a, ctx.dm_b, ctx.dm_e,
                                         ctx.dim_x, ctx.dim_a, ctx.dim_y};
    const Matrix env_avg = reduced_state(detected, dims, {2});
    Eigen::SelfAdjointEigenSolver<Matrix> es(env_avg);
    const std::int64_t dim_bob = ctx.dm_b * ctx.dim_x * ctx.dim_y;
    Vector target = Vector::Zero(dim_bob * ctx.dm_e);
    std::int64_t slot = 0;
    for (std::int64_t k = ctx.dm_e - 1; k >= 0; --k) {
        const double lam = std::max(0.0, es.eigenvalues()[k]);
        if (lam < 1e-15) continue;
        if (slot >= dim_bob)
            throw DomainError("run_coherent_protocol: environment rank exceeds Bob's registers");
        for (std::int64_t e = 0; e < ctx.dm_e; ++e)
            target[slot * ctx.dm_e + e] = std::sqrt(lam) * es.eigenvectors()(e, k);
        ++slot;
    }
    const PureState target_state{Vector(target / target.norm())};

    std::vector<Matrix> decouple(ctx.dim_a);
    for (std::int64_t ua = 0; ua < ctx.dim_a; ++ua) {
        const Vector branch = detected_branch(ctx, delta, ua);
        decouple[ua] = uhlmann_isometry(PureState(branch), target_state, {dim_bob, ctx.dm_e},
                                        /*acting_side=*/0, tol)
                           .isometry;
    }

    // controlled decoupling on the actual state: reorder to
    // [A_hat, outcome_A, (B^N, X_B, outcome_Y), E^N] and act per outcome_A
    Vector arranged = permute_registers(actual, dims, {0, 4, 1, 3, 5, 2});
    for (std::int64_t a0 = 0; a0 < ctx.dim_a; ++a0)
        for (std::int64_t ua = 0; ua < ctx.dim_a; ++ua) {
            const std::int64_t base = (a0 * ctx.dim_a + ua) * dim_bob * ctx.dm_e;
            Eigen::Map<Matrix> block(arranged.data() + base, ctx.dm_e, dim_bob);
            // columns indexed by bob, rows by e (row-major state layout)
            block = block * decouple[ua].transpose();
        }

    // reduce onto the entangled pair and compare with the maximally entangled target
    const std::vector<std::int64_t> dims2{ctx.dim_a, ctx.dim_a, dim_bob, ctx.dm_e};
    const Matrix pair = reduced_state(arranged, dims2, {0, 1});
    double fid = 0.0;
    for (std::int64_t u = 0; u < ctx.dim_a; ++u)
        for (std::int64_t v = 0; v < ctx.dim_a; ++v)
            fid += pair(u * ctx.dim_a + u, v * ctx.dim_a + v).real();
    fid /= static_cast<double>(ctx.dim_a);

    ProtocolTrace trace;
    trace.n = ctx.n;
    trace.labels = code.partition.labels;
    trace.phases = phases;
    trace.phases.gamma = std::move(gamma);
    trace.phases.delta = std::move(delta);
    trace.overlap = overlap;
    trace.leakage = exact_leakage(code, ch, tol);
    trace.final_fidelity = std::clamp(fid, 0.0, 1.0);
    trace.ebit_count = ctx.nx;
    return trace;
}

double ProtocolTrace::fidelity_floor() const {
    return 1.0 - 2.0 * (1.0 - overlap) - 2.0 * std::sqrt(2.0 * std::numbers::ln2 * leakage) -
           1e-6;
}

std::string ProtocolTrace::to_json(const std::string& channel_spec_json) const {
    json j;
    j["n"] = n;
    json sets;
    for (auto label : {SetLabel::A, SetLabel::B, SetLabel::X, SetLabel::Y}) {
        json arr = json::array();
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) arr.push_back(i + 1);
        sets[std::string(1, set_label_char(label))] = arr;
    }
    j["sets"] = sets;
    if (!channel_spec_json.empty()) j["channel"] = json::parse(channel_spec_json);
    auto round12 = [](double v) { return std::strtod(fmt_real(v).c_str(), nullptr); };
    json gamma_arr = json::array(), delta_arr = json::array();
    for (double g : phases.gamma) gamma_arr.push_back(round12(g));
    for (double d : phases.delta) delta_arr.push_back(round12(d));
    j["phases"] = {{"gamma", gamma_arr}, {"delta", delta_arr}};
    j["overlap"] = round12(overlap);
    j["leakage"] = round12(leakage);
    j["final_fidelity"] = round12(final_fidelity);
    j["ebit_count"] = ebit_count;
    return j.dump(2) + "\n";
}

std::vector<EbitRatePoint> ebit_rate_trend(const ChannelSpec& spec, double beta,
                                           const std::vector<int>& n_list,
                                           const Tolerances& tol) {
    const IsometricChannel ch = build_channel(spec, tol);
    const CqChannel wb = bob_channel(ch);
    const CqChannel we = eve_channel(ch);
    std::vector<EbitRatePoint> out;
    for (int n : n_list) {
        const PolarPartition p = partition_channels(wb, we, n, beta, {}, tol);
        out.push_back({n, code_rates(p).key_rate});
    }
    return out;
}

}  // namespace qpc
