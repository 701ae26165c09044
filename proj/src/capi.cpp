#include "qpolar.h"

#include "qpolar/channels.hpp"
#include "qpolar/workbench.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

using namespace qpc;

struct qpolar_channel {
    ChannelSpec spec;
    std::string spec_json;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ResourceError& e) {
        g_last_error = e.what();
        return QPOLAR_ERESOURCE;
    } catch (const DomainError& e) {
        g_last_error = e.what();
        return QPOLAR_EINVAL;
    } catch (const DimensionError& e) {
        g_last_error = e.what();
        return QPOLAR_EINVAL;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return QPOLAR_EINVAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return QPOLAR_EINTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return QPOLAR_EINTERNAL;
    }
}

int check_level(int n) {
    if (n < 0 || n > 26) {
        g_last_error = "level n must lie in [0, 26]";
        return QPOLAR_EINVAL;
    }
    return QPOLAR_OK;
}

}  // namespace

extern "C" {

int qpolar_channel_open(const char* spec_json, qpolar_channel** out) {
    if (!spec_json || !out) {
        g_last_error = "null argument";
        return QPOLAR_EINVAL;
    }
    *out = nullptr;
    return guarded([&] {
        auto handle = new qpolar_channel;
        handle->spec = ChannelSpec::from_json(spec_json);
        handle->spec_json = handle->spec.to_json();
        build_channel(handle->spec);  // surface construction errors eagerly
        *out = handle;
        return QPOLAR_OK;
    });
}

void qpolar_channel_close(qpolar_channel* ch) { delete ch; }

const char* qpolar_channel_spec(const qpolar_channel* ch) {
    return ch ? ch->spec_json.c_str() : nullptr;
}

int qpolar_channel_info(const qpolar_channel* ch, char** json_out) {
    if (!ch || !json_out) {
        g_last_error = "null argument";
        return QPOLAR_EINVAL;
    }
    return guarded([&] {
        *json_out = dup_string(workbench::channel_info_json(ch->spec));
        return QPOLAR_OK;
    });
}

int qpolar_polarize(const qpolar_channel* ch, int n, double beta, const char* mode,
                    char** csv_out, char** summary_json_out) {
    if (!ch || !csv_out || !summary_json_out) {
        g_last_error = "null argument";
        return QPOLAR_EINVAL;
    }
    if (int rc = check_level(n)) return rc;
    return guarded([&] {
        auto out = workbench::polarize(ch->spec, n, beta, mode ? mode : "auto");
        *csv_out = dup_string(out.table);
        *summary_json_out = dup_string(out.report);
        return QPOLAR_OK;
    });
}

int qpolar_partition(const qpolar_channel* ch, const char* eve_spec_json, int n, double beta,
                     uint64_t seed, const char* mode, char** csv_out, char** report_json_out) {
    if (!ch || !csv_out || !report_json_out) {
        g_last_error = "null argument";
        return QPOLAR_EINVAL;
    }
    if (int rc = check_level(n)) return rc;
    return guarded([&] {
        std::optional<ChannelSpec> eve;
        if (eve_spec_json && *eve_spec_json) eve = ChannelSpec::from_json(eve_spec_json);
        auto out = workbench::partition(ch->spec, eve, n, beta, seed, mode ? mode : "auto");
        *csv_out = dup_string(out.table);
        *report_json_out = dup_string(out.report);
        return QPOLAR_OK;
    });
}

int qpolar_simulate(const qpolar_channel* ch, const char* mode, int n, double beta,
                    int64_t trials, uint64_t seed, char** csv_out, char** summary_json_out) {
    if (!ch || !mode || !csv_out || !summary_json_out) {
        g_last_error = "null argument";
        return QPOLAR_EINVAL;
    }
    if (int rc = check_level(n)) return rc;
    return guarded([&] {
        auto out = workbench::simulate(ch->spec, mode, n, beta, trials, seed);
        *csv_out = dup_string(out.table);
        *summary_json_out = dup_string(out.report);
        return QPOLAR_OK;
    });
}

int qpolar_capacity(const char* family, const double* grid, size_t grid_len, char** csv_out) {
    if (!family || (!grid && grid_len) || !csv_out) {
        g_last_error = "null argument";
        return QPOLAR_EINVAL;
    }
    return guarded([&] {
        std::vector<double> points(grid, grid + grid_len);
        *csv_out = dup_string(workbench::capacity_csv(family_from_name(family), points));
        return QPOLAR_OK;
    });
}

int qpolar_verify(const char* suite, uint64_t seed, char** report_json_out) {
    if (!suite || !report_json_out) {
        g_last_error = "null argument";
        return QPOLAR_EINVAL;
    }
    return guarded([&] {
        auto outcome = workbench::verify(suite, seed);
        *report_json_out = dup_string(outcome.report);
        if (!outcome.pass) {
            g_last_error = "verification suite reported failing checks";
            return QPOLAR_EPROPERTY;
        }
        return QPOLAR_OK;
    });
}

void qpolar_free(char* buf) { std::free(buf); }

const char* qpolar_last_error(void) { return g_last_error.c_str(); }

const char* qpolar_version(void) { return "0.1.0"; }

}  // extern "C"
