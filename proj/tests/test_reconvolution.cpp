#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cvep/codes.hpp"
#include "cvep/errors.hpp"
#include "cvep/reconvolution.hpp"
#include "cvep/rng.hpp"

using namespace cvep;

TEST_CASE("a single long flash lands at its run onset") {
    auto code = make_bitseq("0110", 60.0, "c");
    auto ev = derive_events(code, 4.0 / 60.0);
    REQUIRE(ev.cols() == 8);
    CHECK(ev.rows[kEventTrialOnset][0] == 1);
    for (size_t t = 1; t < 8; ++t) CHECK(ev.rows[kEventTrialOnset][t] == 0);

    std::vector<uint8_t> expect_short(8, 0), expect_long(8, 0);
    expect_long[2] = 1;  // bit 1 starts at sample 2 with two samples per bit
    CHECK(ev.rows[kEventShortFlash] == expect_short);
    CHECK(ev.rows[kEventLongFlash] == expect_long);
}

TEST_CASE("tiling classifies a boundary-crossing run by its full length") {
    // "1001" tiled twice reads 10011001: the 1 at bit 3 joins the 1 at bit 4.
    auto code = make_bitseq("1001", 60.0, "c");
    auto ev = derive_events(code, 8.0 / 60.0);
    REQUIRE(ev.cols() == 16);
    std::vector<uint8_t> expect_short(16, 0), expect_long(16, 0);
    expect_short[0] = 1;
    expect_long[6] = 1;
    expect_short[14] = 1;
    CHECK(ev.rows[kEventShortFlash] == expect_short);
    CHECK(ev.rows[kEventLongFlash] == expect_long);
}

TEST_CASE("codes with triple flashes are rejected") {
    CHECK_THROWS_AS(derive_events(make_bitseq("0111", 60.0, "c"), 1.0), ValidationError);
    // cyclic wrap: 110...1 closes a run of three
    CHECK_THROWS_AS(derive_events(make_bitseq("1101", 60.0, "c"), 1.0), ValidationError);
}

TEST_CASE("rate ratio must be integral") {
    auto code = make_bitseq("0110", 60.0, "c");
    CHECK_THROWS_AS(derive_events(code, 1.0, 90.0), ValidationError);
    CHECK_NOTHROW(derive_events(code, 1.0, 60.0));
}

TEST_CASE("structure matrix at L=1 reproduces the event rows") {
    auto code = default_code_pair().left;
    auto ev = derive_events(code, 2.1);
    auto sm = build_structure_matrix(ev, 1);
    REQUIRE(sm.rows() == 3);
    REQUIRE(sm.cols() == static_cast<long>(ev.cols()));
    for (int e = 0; e < kNumEvents; ++e)
        for (long t = 0; t < sm.cols(); ++t)
            CHECK(sm.data(e, t) == static_cast<double>(ev.rows[static_cast<size_t>(e)][static_cast<size_t>(t)]));
}

TEST_CASE("each row is the event row delayed by its lag") {
    auto code = default_code_pair().left;
    auto ev = derive_events(code, 1.05);
    const int L = 7;
    auto sm = build_structure_matrix(ev, L);
    REQUIRE(sm.rows() == 3 * L);
    for (int e = 0; e < kNumEvents; ++e)
        for (int lag = 0; lag < L; ++lag)
            for (long t = 0; t < sm.cols(); ++t) {
                double want = t >= lag ? ev.rows[static_cast<size_t>(e)][static_cast<size_t>(t - lag)] : 0.0;
                CHECK(sm.data(e * L + lag, t) == want);
            }
}

TEST_CASE("overlapping lag support of close flashes") {
    // two short flashes 3 samples apart with L=5: lagged copies share 2 columns
    EventMatrix ev;
    ev.rows[kEventTrialOnset].assign(12, 0);
    ev.rows[kEventShortFlash].assign(12, 0);
    ev.rows[kEventLongFlash].assign(12, 0);
    ev.rows[kEventShortFlash][2] = 1;
    ev.rows[kEventShortFlash][5] = 1;
    auto sm = build_structure_matrix(ev, 5);
    int overlap = 0;
    for (long t = 0; t < 12; ++t) {
        double colsum = 0;
        for (int lag = 0; lag < 5; ++lag) colsum += sm.data(kEventShortFlash * 5 + lag, t);
        if (colsum > 1.5) ++overlap;
    }
    CHECK(overlap == 2);
}

TEST_CASE("r'M equals direct per-flash convolution") {
    Rng rng(421);
    for (int inst = 0; inst < 100; ++inst) {
        const int n_bits = rng.range_int(4, 12);
        BitSequence code;
        code.rate_hz = 60.0;
        code.name = "rand";
        // rejection-sample a code without triple runs (cyclically)
        for (;;) {
            code.bits.clear();
            for (int i = 0; i < n_bits; ++i) code.bits.push_back(static_cast<uint8_t>(rng.below(2)));
            bool ok = false;
            for (int i = 0; i < n_bits && !ok; ++i) ok = code.bits[static_cast<size_t>(i)] == 0;
            for (int i = 0; i < n_bits && ok; ++i)
                ok = !(code.bits[static_cast<size_t>(i)] && code.bits[static_cast<size_t>((i + 1) % n_bits)] &&
                       code.bits[static_cast<size_t>((i + 2) % n_bits)]);
            if (ok) break;
        }
        const double duration = rng.range_int(2, 5) * static_cast<double>(n_bits) / 60.0;
        const int L = rng.range_int(1, 9);
        auto ev = derive_events(code, duration);
        auto sm = build_structure_matrix(ev, L);

        Eigen::VectorXd r(3 * L);
        for (int i = 0; i < r.size(); ++i) r(i) = rng.normal();
        Eigen::RowVectorXd via_structure = r.transpose() * sm.data;

        // oracle: superpose the response segment at every event onset
        Eigen::RowVectorXd direct = Eigen::RowVectorXd::Zero(sm.cols());
        for (int e = 0; e < kNumEvents; ++e)
            for (long t = 0; t < sm.cols(); ++t)
                if (ev.rows[static_cast<size_t>(e)][static_cast<size_t>(t)])
                    for (int lag = 0; lag < L && t + lag < sm.cols(); ++lag)
                        direct(t + lag) += r(e * L + lag);

        CHECK((via_structure - direct).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("response length bounds") {
    auto ev = derive_events(make_bitseq("0110", 60.0, "c"), 4.0 / 60.0);
    CHECK_THROWS_AS(build_structure_matrix(ev, 0), ValidationError);
    CHECK_THROWS_AS(build_structure_matrix(ev, 9), ValidationError);
    CHECK_NOTHROW(build_structure_matrix(ev, 8));
}

TEST_CASE("default pair structure dimensions") {
    auto pair = default_code_pair();
    auto sm = structure_for_code(pair.left, 20.0, 36);
    CHECK(sm.rows() == 108);
    CHECK(sm.cols() == 2400);
    CHECK(sm.code_name == pair.left.name);
    // every sample of every row is binary
    for (long i = 0; i < sm.rows(); ++i)
        for (long j = 0; j < sm.cols(); ++j) {
            double v = sm.data(i, j);
            CHECK((v == 0.0 || v == 1.0));
        }
}
