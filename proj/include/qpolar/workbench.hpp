#pragma once

#include "qpolar/channels.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qpc::workbench {

/// File-ready payloads for one subcommand run. `table` is the CSV artifact,
/// `report` the JSON one; either may be empty when a command produces only
/// the other. All text is byte-deterministic for identical inputs.
struct Output {
    std::string table;
    std::string report;
};

std::string channel_info_json(const ChannelSpec& spec);

Output polarize(const ChannelSpec& spec, int n, double beta, const std::string& mode);

Output partition(const ChannelSpec& spec, const std::optional<ChannelSpec>& eve_spec, int n,
                 double beta, std::uint64_t seed, const std::string& mode);

Output simulate(const ChannelSpec& spec, const std::string& mode, int n, double beta,
                std::int64_t trials, std::uint64_t seed);

std::string capacity_csv(Family family, const std::vector<double>& grid);

struct VerifyOutcome {
    bool pass = false;
    std::string report;
};

/// suite: appendix_a | appendix_b | lemma1 | conservation
VerifyOutcome verify(const std::string& suite, std::uint64_t seed);

}  // namespace qpc::workbench
