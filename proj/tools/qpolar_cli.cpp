// Command-line workbench over the qpolar C API. All heavy lifting happens
// behind the shared-library boundary; this binary only parses arguments,
// shuttles strings, and writes files.
#include "qpolar.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Freer {
    void operator()(char* p) const { qpolar_free(p); }
};
using CStr = std::unique_ptr<char, Freer>;

struct ChannelCloser {
    void operator()(qpolar_channel* ch) const { qpolar_channel_close(ch); }
};
using Channel = std::unique_ptr<qpolar_channel, ChannelCloser>;

int fail(int rc) {
    std::cerr << "error: " << qpolar_last_error() << "\n";
    return rc;
}

std::string load_spec(const std::string& arg) {
    if (!arg.empty() && arg.front() == '{') return arg;  // inline JSON
    std::ifstream in(arg, std::ios::binary);
    if (!in) throw CLI::ValidationError("--spec", "cannot open spec file: " + arg);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << text;
    return out.good();
}

/// Emit the selected artifact to --out or stdout; when a companion artifact
/// exists and a file was requested, it lands next to it with the companion
/// extension.
int emit(const std::string& out_path, const std::string& format, const std::string& csv,
         const std::string& json) {
    const bool want_csv = format == "csv";
    const std::string& primary = want_csv ? csv : json;
    const std::string& companion = want_csv ? json : csv;
    if (primary.empty()) {
        std::cerr << "error: no " << format << " artifact for this command\n";
        return QPOLAR_EINVAL;
    }
    if (out_path.empty()) {
        std::cout << primary;
        return 0;
    }
    if (!write_file(out_path, primary)) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return QPOLAR_EINTERNAL;
    }
    if (!companion.empty()) {
        const std::string side = out_path + (want_csv ? ".json" : ".csv");
        if (!write_file(side, companion)) {
            std::cerr << "error: cannot write " << side << "\n";
            return QPOLAR_EINTERNAL;
        }
    }
    return 0;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        // start:stop:count
        double start = 0, stop = 0;
        long count = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%ld", &start, &stop, &count) != 3 || count < 1)
            throw CLI::ValidationError("--grid", "expected start:stop:count");
        for (long k = 0; k < count; ++k)
            out.push_back(count == 1 ? start : start + (stop - start) * k / (count - 1));
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    if (out.empty()) throw CLI::ValidationError("--grid", "empty grid");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qpolar: polar codes for binary-input classical-quantum channels"};
    app.require_subcommand(1);

    std::string spec_arg, eve_spec_arg, out_path, format, mode, suite, grid_arg;
    int n = 4;
    double beta = 0.2;
    std::int64_t trials = 1000;
    std::uint64_t seed = 1;

    auto add_common = [&](CLI::App* cmd, bool needs_spec) {
        if (needs_spec)
            cmd->add_option("--spec", spec_arg, "channel spec JSON (inline or a file path)")
                ->required();
        cmd->add_option("--n", n, "polarization level, blocklength N = 2^n");
        cmd->add_option("--beta", beta, "polar coding rule exponent in (0, 1/2)");
        cmd->add_option("--trials", trials, "Monte Carlo trials");
        cmd->add_option("--seed", seed, "64-bit seed; all randomness derives from it");
        cmd->add_option("--out", out_path, "output file (stdout when omitted)");
        cmd->add_option("--format", format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    auto* info = app.add_subcommand("channel-info", "Holevo and fidelity figures of a channel");
    add_common(info, true);

    auto* polarize = app.add_subcommand("polarize", "synthesized-channel trajectory table");
    add_common(polarize, true);
    polarize->add_option("--mode", mode, "auto, exact or bounds")
        ->check(CLI::IsMember({"auto", "exact", "bounds"}));

    auto* partition = app.add_subcommand("partition", "wiretap index partition and bounds");
    add_common(partition, true);
    partition->add_option("--eve-spec", eve_spec_arg,
                          "optional spec whose Bob marginal plays the eavesdropper");
    partition->add_option("--mode", mode, "auto, exact or bounds")
        ->check(CLI::IsMember({"auto", "exact", "bounds"}));

    auto* simulate = app.add_subcommand("simulate", "decoder Monte Carlo or a coherent run");
    add_common(simulate, true);
    simulate->add_option("--mode", mode, "classical_sc, quantum_sc or coherent")
        ->required()
        ->check(CLI::IsMember({"classical_sc", "quantum_sc", "coherent"}));

    auto* capacity = app.add_subcommand("capacity", "capacity ratio curve over a parameter grid");
    add_common(capacity, true);
    capacity->add_option("--grid", grid_arg, "start:stop:count or comma-separated values")
        ->required();

    auto* verify = app.add_subcommand("verify", "run a built-in property suite");
    add_common(verify, false);
    verify->add_option("--suite", suite, "appendix_a, appendix_b, lemma1 or conservation")
        ->required()
        ->check(CLI::IsMember({"appendix_a", "appendix_b", "lemma1", "conservation"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : QPOLAR_EINVAL;
    }

    try {
        if (verify->parsed()) {
            CStr report;
            char* raw = nullptr;
            const int rc = qpolar_verify(suite.c_str(), seed, &raw);
            report.reset(raw);
            if (rc != QPOLAR_OK && rc != QPOLAR_EPROPERTY) return fail(rc);
            if (format.empty()) format = "json";
            const int erc = emit(out_path, format, "", report.get());
            return erc != 0 ? erc : rc;
        }

        const std::string spec_json = load_spec(spec_arg);
        Channel ch;
        {
            qpolar_channel* raw = nullptr;
            if (int rc = qpolar_channel_open(spec_json.c_str(), &raw)) return fail(rc);
            ch.reset(raw);
        }

        if (info->parsed()) {
            char* raw = nullptr;
            if (int rc = qpolar_channel_info(ch.get(), &raw)) return fail(rc);
            CStr report(raw);
            if (format.empty()) format = "json";
            return emit(out_path, format, "", report.get());
        }

        if (polarize->parsed()) {
            char *csv_raw = nullptr, *json_raw = nullptr;
            if (int rc = qpolar_polarize(ch.get(), n, beta, mode.c_str(), &csv_raw, &json_raw))
                return fail(rc);
            CStr csv(csv_raw), report(json_raw);
            if (format.empty()) format = "csv";
            return emit(out_path, format, csv.get(), report.get());
        }

        if (partition->parsed()) {
            char *csv_raw = nullptr, *json_raw = nullptr;
            if (int rc = qpolar_partition(ch.get(), eve_spec_arg.empty() ? nullptr : eve_spec_arg.c_str(),
                                          n, beta, seed, mode.c_str(), &csv_raw, &json_raw))
                return fail(rc);
            CStr csv(csv_raw), report(json_raw);
            if (format.empty()) format = "csv";
            return emit(out_path, format, csv.get(), report.get());
        }

        if (simulate->parsed()) {
            char *csv_raw = nullptr, *json_raw = nullptr;
            if (int rc = qpolar_simulate(ch.get(), mode.c_str(), n, beta, trials, seed, &csv_raw,
                                         &json_raw))
                return fail(rc);
            CStr csv(csv_raw), report(json_raw);
            if (format.empty()) format = (mode == "coherent") ? "json" : "csv";
            return emit(out_path, format, csv.get(), report.get());
        }

        if (capacity->parsed()) {
            const auto grid = parse_grid(grid_arg);
            // the family comes from the spec; its parameter field is unused here
            std::string family;
            {
                const std::string key = "\"family\":\"";
                const char* norm = qpolar_channel_spec(ch.get());
                std::string s = norm ? norm : "";
                const auto pos = s.find(key);
                if (pos == std::string::npos) {
                    std::cerr << "error: spec carries no family\n";
                    return QPOLAR_EINVAL;
                }
                const auto end = s.find('"', pos + key.size());
                family = s.substr(pos + key.size(), end - pos - key.size());
            }
            char* raw = nullptr;
            if (int rc = qpolar_capacity(family.c_str(), grid.data(), grid.size(), &raw))
                return fail(rc);
            CStr csv(raw);
            if (format.empty()) format = "csv";
            return emit(out_path, format, csv.get(), "");
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return QPOLAR_EINVAL;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return QPOLAR_EINTERNAL;
    }
    return QPOLAR_EINVAL;
}
