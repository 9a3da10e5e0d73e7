#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <limits>

#include "cvep/errors.hpp"
#include "cvep/eval.hpp"
#include "cvep/simulator.hpp"

using namespace cvep;

namespace {

Dataset dataset_with(double snr, uint64_t seed = 13) {
    auto fm = default_forward_model(8, 0.3, seed);
    fm.snr = snr;
    return simulate_dataset(make_session_plan(seed), fm, default_code_pair(), seed + 1);
}

std::vector<long> fold_sizes(const FoldAssignment& fa) {
    std::vector<long> sizes(static_cast<size_t>(fa.k), 0);
    for (int f : fa.fold_of_trial) ++sizes[static_cast<size_t>(f)];
    return sizes;
}

}  // namespace

TEST_CASE("chronological folds are contiguous blocks") {
    auto fa = chronological_folds(80, 4);
    CHECK(fold_sizes(fa) == std::vector<long>{20, 20, 20, 20});
    for (long j = 0; j < 80; ++j) CHECK(fa.fold_of_trial[static_cast<size_t>(j)] == j / 20);

    auto fa2 = chronological_folds(20, 4);
    CHECK(fold_sizes(fa2) == std::vector<long>{5, 5, 5, 5});

    // remainders go to the leading folds
    auto fa3 = chronological_folds(10, 3);
    CHECK(fold_sizes(fa3) == std::vector<long>{4, 3, 3});
    CHECK(fa3.fold_of_trial == std::vector<int>{0, 0, 0, 0, 1, 1, 1, 2, 2, 2});

    CHECK_THROWS_AS(chronological_folds(3, 4), ValidationError);
    CHECK_THROWS_AS(chronological_folds(10, 1), ValidationError);
}

TEST_CASE("permutation p-value uses the add-one estimator") {
    Rng rng(1);
    // perfect predictions on balanced labels: no shuffle ties the observed 80
    std::vector<int> labels;
    for (int i = 0; i < 80; ++i) labels.push_back(i % 2);
    double p = permutation_pvalue(labels, labels, 1000, rng);
    CHECK(p == doctest::Approx(1.0 / 1001.0));

    Rng rng2(2);
    CHECK(permutation_pvalue(labels, labels, 0, rng2) == 1.0);

    // anti-predictions: every permutation scores at least as well
    std::vector<int> wrong(labels);
    for (auto& y : wrong) y = 1 - y;
    Rng rng3(3);
    CHECK(permutation_pvalue(wrong, labels, 500, rng3) == 1.0);

    CHECK_THROWS_AS(permutation_pvalue({}, {}, 10, rng), ValidationError);
    CHECK_THROWS_AS(permutation_pvalue({1, 0}, {1}, 10, rng), ValidationError);
}

TEST_CASE("noise-free covert evaluation is perfect and significant") {
    auto ds = dataset_with(std::numeric_limits<double>::infinity());
    auto covert = condition_subset(ds, Condition::Covert);
    auto res = cross_validate(covert, ds.left_code, ds.right_code, 36);
    REQUIRE(res.fold_accuracies.size() == 4);
    for (double a : res.fold_accuracies) CHECK(a == 1.0);
    CHECK(res.mean_accuracy == 1.0);
    CHECK(res.p_value == doctest::Approx(1.0 / 1001.0));
    CHECK(res.l_samples == 36);
    CHECK(res.length_s == doctest::Approx(0.3));
    CHECK(res.condition == "covert");
    CHECK(res.predictions == covert.labels);
}

TEST_CASE("pure-noise evaluation hovers at chance") {
    auto ds = dataset_with(0.0, 29);
    auto covert = condition_subset(ds, Condition::Covert);
    auto res = cross_validate(covert, ds.left_code, ds.right_code, 36);
    CHECK(res.mean_accuracy >= 0.3904);
    CHECK(res.mean_accuracy <= 0.6096);
    CHECK(res.p_value > 0.01);
}

TEST_CASE("a single-class training fold is refused") {
    auto ds = dataset_with(1.0);
    TrialSet set;
    set.rate_hz = ds.rate_hz;
    set.channel_names = ds.channel_names;
    for (int j = 0; j < 4; ++j) set.trials.push_back(ds.trials[static_cast<size_t>(j)]);
    set.labels = {1, 0, 0, 0};  // training for fold 0 sees only zeros
    CHECK_THROWS_AS(cross_validate(set, ds.left_code, ds.right_code, 36, kDefaultRidge, 4, 0),
                    ValidationError);
}

TEST_CASE("the default sweep covers 0.1 to 0.9 seconds") {
    auto lengths = default_sweep_lengths();
    REQUIRE(lengths.size() == 9);
    CHECK(lengths.front() == doctest::Approx(0.1));
    CHECK(lengths.back() == doctest::Approx(0.9));
}

TEST_CASE("sweep lengths must land on sample boundaries") {
    auto ds = dataset_with(1.0);
    auto covert = condition_subset(ds, Condition::Covert);
    CHECK_THROWS_AS(
        sweep_response_length(covert, ds.left_code, ds.right_code, {0.11}, kDefaultRidge, 4, 0),
        ValidationError);
    CHECK_THROWS_AS(
        sweep_response_length(covert, ds.left_code, ds.right_code, {}, kDefaultRidge, 4, 0),
        ValidationError);
}

TEST_CASE("sweep results serialize to csv and back") {
    auto ds = dataset_with(2.0, 17);
    auto covert = condition_subset(ds, Condition::Covert);
    auto curve = sweep_response_length(covert, ds.left_code, ds.right_code, {0.2, 0.3},
                                       kDefaultRidge, 4, 50, 5);
    REQUIRE(curve.size() == 2);
    CHECK(curve[0].length_s == doctest::Approx(0.2));
    CHECK(curve[1].result.l_samples == 36);

    std::string csv = curve_to_csv(curve);
    CHECK(csv.rfind("length_s,fold,accuracy,mean_accuracy,p_value\n", 0) == 0);
    auto parsed = curve_from_csv(csv);
    REQUIRE(parsed.size() == 2);
    CHECK(curve_to_csv(parsed) == csv);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(parsed[i].length_s == curve[i].length_s);
        CHECK(parsed[i].result.mean_accuracy == curve[i].result.mean_accuracy);
        CHECK(parsed[i].result.p_value == curve[i].result.p_value);
        CHECK(parsed[i].result.fold_accuracies == curve[i].result.fold_accuracies);
    }

    CHECK_THROWS_AS(curve_from_csv("bogus,header\n1,2\n"), ValidationError);
}

TEST_CASE("the svg report plots every curve with chance and marker lines") {
    auto ds = dataset_with(2.0, 17);
    auto covert = condition_subset(ds, Condition::Covert);
    auto curve = sweep_response_length(covert, ds.left_code, ds.right_code, {0.2, 0.3},
                                       kDefaultRidge, 4, 0);
    std::string svg = render_sweep_svg({{"covert <run>", curve}});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("chance") != std::string::npos);
    CHECK(svg.find("0.3 s") != std::string::npos);
    CHECK(svg.find("covert &lt;run&gt;") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK_THROWS_AS(render_sweep_svg({}), ValidationError);
}

TEST_CASE("permutation results are seed-stable") {
    auto ds = dataset_with(0.0, 37);
    auto covert = condition_subset(ds, Condition::Covert);
    auto a = cross_validate(covert, ds.left_code, ds.right_code, 24, kDefaultRidge, 4, 300, 9);
    auto b = cross_validate(covert, ds.left_code, ds.right_code, 24, kDefaultRidge, 4, 300, 9);
    auto c = cross_validate(covert, ds.left_code, ds.right_code, 24, kDefaultRidge, 4, 300, 10);
    CHECK(a.p_value == b.p_value);
    CHECK(a.mean_accuracy == b.mean_accuracy);
    // different permutation seed shifts only the p-value estimate
    CHECK(c.mean_accuracy == a.mean_accuracy);
}
