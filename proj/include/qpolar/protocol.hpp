#pragma once

#include "qpolar/channels.hpp"
#include "qpolar/sc_decode.hpp"
#include "qpolar/wiretap.hpp"

#include <string>
#include <vector>

namespace qpc {

/// Relative phases on the randomized-index branches: gamma applied by the
/// sender before encoding, delta carried by the reference detected state.
/// Indexed by the packed u_Y value.
struct PhaseAssignment {
    std::vector<double> gamma;
    std::vector<double> delta;
    double aligned_average = 0.0;    // mean |T_uY| after alignment
    double unaligned_average = 0.0;  // |mean T_uY| with all phases zero
};

/// Branch-overlap phase selection: each delta is the argument of the
/// computed branch overlap, gamma stays zero.
PhaseAssignment select_phases(const IsometricChannel& ch, const WiretapCode& code,
                              const Tolerances& tol = default_tols());

struct ProtocolTrace {
    int n = 0;
    std::vector<SetLabel> labels;
    PhaseAssignment phases;
    double overlap = 0.0;         // |<detected|actual>| after the decoder
    double leakage = 0.0;         // exact Holevo leakage of the wiretap code
    double final_fidelity = 0.0;  // squared overlap with the maximally entangled target
    std::int64_t ebit_count = 0;

    /// 1 - 2 (1 - overlap) - 2 sqrt(2 ln2 leakage) - 1e-6, the floor the
    /// protocol run is expected to stay above.
    double fidelity_floor() const;

    std::string to_json(const std::string& channel_spec_json) const;
};

/// Full state-vector run: Bell halves on A, frozen ancillas on B, superposed
/// ancillas on Y, ebit halves on X, coherent encoder with phases, the channel
/// isometry on every use, the coherent measurement cascade, controlled
/// Uhlmann decoupling, and the final reduction onto the entangled pair.
ProtocolTrace run_coherent_protocol(const IsometricChannel& ch, const WiretapCode& code,
                                    const PhaseAssignment& phases,
                                    const Tolerances& tol = default_tols());

/// Cascade Kraus operator for one outcome pattern: the ordered product of
/// Helstrom projectors along the decode path. `u` holds all N bit values
/// (pinned positions read from it as well).
Matrix decoder_cascade_operator(const HelstromCascade& cascade, const DecodeLayout& layout,
                                const BitVec& u);

struct EbitRatePoint {
    int n = 0;
    double key_rate = 0.0;  // |X| / N
};

std::vector<EbitRatePoint> ebit_rate_trend(const ChannelSpec& spec, double beta,
                                           const std::vector<int>& n_list,
                                           const Tolerances& tol = default_tols());

}  // namespace qpc
