#pragma once

#include <array>
#include <string>
#include <vector>

#include "cvep/decoder.hpp"
#include "cvep/rng.hpp"

namespace cvep {

// Contiguous chronological blocks; the first n % k blocks get the extra
// trial.
struct FoldAssignment {
    int k = 0;
    std::vector<int> fold_of_trial;
};

FoldAssignment chronological_folds(long n_trials, int k);

struct EvalResult {
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
    std::vector<int> predictions;  // one per trial, chronological order
    std::vector<std::array<double, 2>> scores;
    double p_value = 1.0;
    int l_samples = 0;
    double length_s = 0.0;
    double ridge = 0.0;
    int k = 0;
    std::string condition;
};

// Chronological k-fold: fit on the other folds, predict the held-out block,
// average fold accuracies, then permutation-test the pooled predictions.
EvalResult cross_validate(const TrialSet& data, const BitSequence& left_code,
                          const BitSequence& right_code, int l_samples,
                          double ridge = kDefaultRidge, int k = 4, int n_perm = 1000,
                          uint64_t perm_seed = 1);

// Add-one estimator over label permutations of the fixed predictions:
// p = (1 + #{perm accuracy >= observed}) / (1 + n_perm). n_perm = 0 gives 1.
double permutation_pvalue(const std::vector<int>& predictions, const std::vector<int>& labels,
                          int n_perm, Rng& rng);

struct SweepPoint {
    double length_s = 0.0;
    EvalResult result;
};

std::vector<double> default_sweep_lengths();  // 0.1 .. 0.9 s

// One cross-validation per response length; lengths must map to whole
// sample counts at the data rate.
std::vector<SweepPoint> sweep_response_length(const TrialSet& data, const BitSequence& left_code,
                                              const BitSequence& right_code,
                                              const std::vector<double>& lengths_s,
                                              double ridge = kDefaultRidge, int k = 4,
                                              int n_perm = 1000, uint64_t perm_seed = 1);

// columns: length_s,fold,accuracy,mean_accuracy,p_value (one row per
// length x fold).
std::string curve_to_csv(const std::vector<SweepPoint>& curve);
std::vector<SweepPoint> curve_from_csv(const std::string& csv);

struct NamedCurve {
    std::string label;
    std::vector<SweepPoint> points;
};

// Accuracy-vs-length line plot with a chance-level line and the 0.3 s
// operating point marked.
std::string render_sweep_svg(const std::vector<NamedCurve>& curves);

}  // namespace cvep
