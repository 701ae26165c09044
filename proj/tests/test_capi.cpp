#include "qpolar.h"

#include <doctest.h>

#include <cstring>
#include <string>

namespace {

struct Str {
    char* p = nullptr;
    ~Str() { qpolar_free(p); }
    std::string view() const { return p ? std::string(p) : std::string(); }
};

struct Chan {
    qpolar_channel* p = nullptr;
    ~Chan() { qpolar_channel_close(p); }
};

}  // namespace

TEST_CASE("channel handle lifecycle and spec normalization") {
    Chan ch;
    REQUIRE(qpolar_channel_open("{\"family\":\"erasure\",\"parameter\":0.25}", &ch.p) ==
            QPOLAR_OK);
    const std::string spec = qpolar_channel_spec(ch.p);
    CHECK(spec.find("\"erasure\"") != std::string::npos);

    qpolar_channel* bad = nullptr;
    CHECK(qpolar_channel_open("{\"family\":\"nope\"}", &bad) == QPOLAR_EINVAL);
    CHECK(bad == nullptr);
    CHECK(std::strlen(qpolar_last_error()) > 0);
    CHECK(qpolar_channel_open(nullptr, &bad) == QPOLAR_EINVAL);
}

TEST_CASE("channel info carries the expected quantities") {
    Chan ch;
    REQUIRE(qpolar_channel_open("{\"family\":\"erasure\",\"parameter\":0.25}", &ch.p) ==
            QPOLAR_OK);
    Str info;
    REQUIRE(qpolar_channel_info(ch.p, &info.p) == QPOLAR_OK);
    const auto text = info.view();
    CHECK(text.find("\"coherent_info\": 0.5") != std::string::npos);
    CHECK(text.find("\"holevo_bob\": 0.75") != std::string::npos);
    CHECK(text.find("\"holevo_eve\": 0.25") != std::string::npos);
}

TEST_CASE("polarize over the C boundary") {
    Chan ch;
    REQUIRE(qpolar_channel_open("{\"family\":\"erasure\",\"parameter\":0.5}", &ch.p) == QPOLAR_OK);
    Str csv, summary;
    REQUIRE(qpolar_polarize(ch.p, 2, 0.2, "auto", &csv.p, &summary.p) == QPOLAR_OK);
    CHECK(csv.view().find("2,4,++,-4,-4,0.0625") != std::string::npos);
    CHECK(summary.view().find("\"mode\": \"exact\"") != std::string::npos);

    Str c2, s2;
    CHECK(qpolar_polarize(ch.p, -1, 0.2, "auto", &c2.p, &s2.p) == QPOLAR_EINVAL);
    CHECK(qpolar_polarize(ch.p, 2, 0.7, "auto", &c2.p, &s2.p) == QPOLAR_EINVAL);
}

TEST_CASE("partition and simulate over the C boundary") {
    Chan ch;
    REQUIRE(qpolar_channel_open("{\"family\":\"erasure\",\"parameter\":0.25}", &ch.p) ==
            QPOLAR_OK);
    Str csv, report;
    REQUIRE(qpolar_partition(ch.p, nullptr, 4, 0.2, 7, "auto", &csv.p, &report.p) == QPOLAR_OK);
    CHECK(csv.view().starts_with("index,set,bob_upper_log2,eve_lower_log2\n"));
    CHECK(report.view().find("\"security_bound\"") != std::string::npos);

    Str mc_csv, mc_sum;
    REQUIRE(qpolar_simulate(ch.p, "classical_sc", 4, 0.2, 50, 11, &mc_csv.p, &mc_sum.p) ==
            QPOLAR_OK);
    CHECK(mc_csv.view().starts_with("trial,error_flag\n"));
    CHECK(mc_sum.view().find("\"within_bound\": true") != std::string::npos);

    Str bad_csv, bad_sum;
    CHECK(qpolar_simulate(ch.p, "warp", 4, 0.2, 10, 1, &bad_csv.p, &bad_sum.p) == QPOLAR_EINVAL);

    // resource refusal propagates as its own code: exact quantum run at a
    // blocklength whose B^N no longer fits the cap
    Str big_csv, big_sum;
    CHECK(qpolar_simulate(ch.p, "quantum_sc", 10, 0.2, 1, 1, &big_csv.p, &big_sum.p) ==
          QPOLAR_ERESOURCE);
}

TEST_CASE("capacity and verify over the C boundary") {
    const double grid[3] = {0.1, 0.2, 0.3};
    Str csv;
    REQUIRE(qpolar_capacity("erasure", grid, 3, &csv.p) == QPOLAR_OK);
    const auto text = csv.view();
    CHECK(text.starts_with("parameter,q_true,ic_sym,ratio,flag\n"));
    CHECK(text.find(",1,ok") != std::string::npos);

    Str rep;
    CHECK(qpolar_verify("conservation", 3, &rep.p) == QPOLAR_OK);
    CHECK(rep.view().find("\"pass\": true") != std::string::npos);
    Str rep2;
    CHECK(qpolar_verify("no_such_suite", 3, &rep2.p) == QPOLAR_EINVAL);
}

TEST_CASE("identical calls return identical bytes") {
    Chan ch;
    REQUIRE(qpolar_channel_open("{\"family\":\"amplitude_damping\",\"parameter\":0.1}", &ch.p) ==
            QPOLAR_OK);
    Str a_csv, a_sum, b_csv, b_sum;
    REQUIRE(qpolar_simulate(ch.p, "quantum_sc", 2, 0.2, 64, 5, &a_csv.p, &a_sum.p) == QPOLAR_OK);
    REQUIRE(qpolar_simulate(ch.p, "quantum_sc", 2, 0.2, 64, 5, &b_csv.p, &b_sum.p) == QPOLAR_OK);
    CHECK(a_csv.view() == b_csv.view());
    CHECK(a_sum.view() == b_sum.view());
}
