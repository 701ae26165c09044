#include "qpolar/protocol.hpp"

#include <doctest.h>

#include "oracles.hpp"
#include "qpolar/encoding.hpp"

using namespace qpc;
using namespace qpc::testing;

namespace {

ChannelSpec make_spec(Family f, double p) {
    ChannelSpec s;
    s.family = f;
    s.parameter = p;
    return s;
}

WiretapCode code_for(const IsometricChannel& ch, int n, double beta, std::uint64_t seed) {
    auto p = partition_channels(bob_channel(ch), eve_channel(ch), n, beta);
    return WiretapCode::with_zero_frozen(std::move(p), seed);
}

}  // namespace

TEST_CASE("noiseless channels generate perfect entanglement at N = 2") {
    // identity realized as amplitude damping with zero loss
    for (auto spec : {make_spec(Family::amplitude_damping, 0.0), make_spec(Family::erasure, 0.0)}) {
        auto ch = build_channel(spec);
        auto code = code_for(ch, 1, 0.2, 1);
        REQUIRE(code.partition.count(SetLabel::A) == 2);  // all indices carry information
        auto phases = select_phases(ch, code);
        auto trace = run_coherent_protocol(ch, code, phases);
        CHECK(trace.final_fidelity == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(trace.overlap == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(trace.leakage < 1e-9);
        CHECK(trace.ebit_count == 0);
        CHECK(trace.final_fidelity >= trace.fidelity_floor());
    }
}

TEST_CASE("amplitude damping N = 4 satisfies the trace's own fidelity floor") {
    auto ch = build_channel(make_spec(Family::amplitude_damping, 0.1));
    auto code = code_for(ch, 2, 0.2, 2);
    auto phases = select_phases(ch, code);
    auto trace = run_coherent_protocol(ch, code, phases);
    CHECK(trace.final_fidelity >= trace.fidelity_floor());
    CHECK(trace.final_fidelity <= 1.0);
    CHECK(trace.overlap <= 1.0 + 1e-12);
    CHECK(trace.leakage >= 0.0);
}

TEST_CASE("final fidelity does not degrade as the damping vanishes") {
    double prev = 0.0;
    for (double g : {0.3, 0.25, 0.2, 0.1, 0.0}) {
        auto ch = build_channel(make_spec(Family::amplitude_damping, g));
        auto code = code_for(ch, 1, 0.2, 3);
        auto trace = run_coherent_protocol(ch, code, select_phases(ch, code));
        CHECK(trace.final_fidelity >= prev - 1e-9);
        prev = trace.final_fidelity;
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("phase alignment never loses to the unaligned choice") {
    auto ch = build_channel(make_spec(Family::dephasing, 0.1));
    auto code = code_for(ch, 2, 0.2, 4);
    auto phases = select_phases(ch, code);
    CHECK(phases.aligned_average >= phases.unaligned_average - 1e-9);
    // empty Y set: trivial assignment
    auto ch0 = build_channel(make_spec(Family::amplitude_damping, 0.0));
    auto code0 = code_for(ch0, 1, 0.2, 5);
    REQUIRE(code0.partition.count(SetLabel::Y) == 0);
    auto phases0 = select_phases(ch0, code0);
    CHECK(phases0.gamma.size() == 1);
    CHECK(phases0.delta.size() == 1);
    // aligned run overlap dominates the zero-phase run
    if (code.partition.count(SetLabel::Y) > 0) {
        auto aligned = run_coherent_protocol(ch, code, phases);
        PhaseAssignment none;
        none.gamma.assign(std::size_t(1) << code.partition.count(SetLabel::Y), 0.0);
        none.delta = none.gamma;
        auto flat = run_coherent_protocol(ch, code, none);
        CHECK(aligned.overlap >= flat.overlap - 1e-9);
    }
}

TEST_CASE("the coherent decoder is an isometry") {
    auto ch = build_channel(make_spec(Family::amplitude_damping, 0.2));
    auto code = code_for(ch, 1, 0.2, 6);
    // norm preservation through encode+channel+decode on the protocol state
    auto phases = select_phases(ch, code);
    auto trace = run_coherent_protocol(ch, code, phases);
    CHECK(trace.overlap <= 1.0 + 1e-8);

    // cascade Kraus operators complete: sum over outcomes of M^dag M = I
    HelstromCascade cascade(bob_channel(ch), 1);
    DecodeLayout layout = DecodeLayout::all_information(2);
    Matrix acc = Matrix::Zero(4, 4);
    for (std::uint64_t pattern = 0; pattern < 4; ++pattern) {
        BitVec u{static_cast<std::uint8_t>((pattern >> 1) & 1),
                 static_cast<std::uint8_t>(pattern & 1)};
        Matrix m = decoder_cascade_operator(cascade, layout, u);
        acc += m.adjoint() * m;
    }
    CHECK((acc - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);

    // branch norms of the cascade sum to one on random inputs
    auto g = rng(88);
    for (int it = 0; it < 20; ++it) {
        const Vector psi = random_pure(4, g).amplitudes();
        double total = 0.0;
        for (std::uint64_t pattern = 0; pattern < 4; ++pattern) {
            BitVec u{static_cast<std::uint8_t>((pattern >> 1) & 1),
                     static_cast<std::uint8_t>(pattern & 1)};
            total += (decoder_cascade_operator(cascade, layout, u) * psi).squaredNorm();
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("cascade Kraus equals the square-root POVM form on commuting channels") {
    // AD outputs are diagonal, so the cascade projectors commute and the
    // ordered product coincides with sqrt(M^dag M)
    auto ch = build_channel(make_spec(Family::amplitude_damping, 0.15));
    HelstromCascade cascade(bob_channel(ch), 1);
    DecodeLayout layout = DecodeLayout::all_information(2);
    for (std::uint64_t pattern = 0; pattern < 4; ++pattern) {
        BitVec u{static_cast<std::uint8_t>((pattern >> 1) & 1),
                 static_cast<std::uint8_t>(pattern & 1)};
        Matrix m = decoder_cascade_operator(cascade, layout, u);
        Matrix sqrt_povm = matrix_sqrt(m.adjoint() * m);
        CHECK((m - sqrt_povm).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("protocol trace serializes with layout, phases and fidelity") {
    auto ch = build_channel(make_spec(Family::amplitude_damping, 0.1));
    auto code = code_for(ch, 1, 0.2, 7);
    auto trace = run_coherent_protocol(ch, code, select_phases(ch, code));
    auto spec = make_spec(Family::amplitude_damping, 0.1);
    auto txt = trace.to_json(spec.to_json());
    for (const char* key : {"sets", "phases", "overlap", "leakage", "final_fidelity",
                            "ebit_count", "channel"})
        CHECK(txt.find(std::string("\"") + key + "\"") != std::string::npos);
    CHECK(txt == trace.to_json(spec.to_json()));
}

TEST_CASE("hand-built layouts exercise the ebit and superposed registers") {
    // noiseless channel, one ebit position and one information position
    auto ch = build_channel(make_spec(Family::amplitude_damping, 0.0));
    auto base = partition_channels(bob_channel(ch), eve_channel(ch), 1, 0.2);

    {
        PolarPartition p = base;
        p.labels = {SetLabel::X, SetLabel::A};
        auto code = WiretapCode::with_zero_frozen(p, 9);
        REQUIRE(code.key.size() == 1);
        auto trace = run_coherent_protocol(ch, code, select_phases(ch, code));
        CHECK(trace.ebit_count == 1);
        CHECK(trace.final_fidelity == doctest::Approx(1.0).epsilon(1e-9));
    }
    {
        PolarPartition p = base;
        p.labels = {SetLabel::Y, SetLabel::A};
        auto code = WiretapCode::with_zero_frozen(p, 10);
        auto phases = select_phases(ch, code);
        REQUIRE(phases.delta.size() == 2);
        auto trace = run_coherent_protocol(ch, code, phases);
        CHECK(trace.final_fidelity == doctest::Approx(1.0).epsilon(1e-9));
    }
    {
        // noisy channel with every register kind present at N = 4
        auto noisy = build_channel(make_spec(Family::amplitude_damping, 0.1));
        auto p4 = partition_channels(bob_channel(noisy), eve_channel(noisy), 2, 0.2);
        p4.labels = {SetLabel::B, SetLabel::X, SetLabel::Y, SetLabel::A};
        auto code = WiretapCode::with_zero_frozen(p4, 11);
        auto trace = run_coherent_protocol(noisy, code, select_phases(noisy, code));
        CHECK(trace.final_fidelity >= trace.fidelity_floor());
        CHECK(trace.final_fidelity <= 1.0 + 1e-12);
        CHECK(trace.ebit_count == 1);
    }
}

TEST_CASE("ebit rate trend is non-increasing for degraded erasure") {
    auto spec = make_spec(Family::erasure, 0.25);
    auto trend = ebit_rate_trend(spec, 0.2, {6, 8, 10, 12});
    for (std::size_t i = 1; i < trend.size(); ++i)
        CHECK(trend[i].key_rate <= trend[i - 1].key_rate + 1e-12);

    auto zero = ebit_rate_trend(make_spec(Family::erasure, 0.0), 0.2, {4, 6});
    for (const auto& pt : zero) CHECK(pt.key_rate == doctest::Approx(0.0));

    auto deph = ebit_rate_trend(make_spec(Family::dephasing, 0.1), 0.2, {6, 8, 10});
    for (std::size_t i = 1; i < deph.size(); ++i)
        CHECK(deph[i].key_rate <= deph[i - 1].key_rate + 1e-12);
}
