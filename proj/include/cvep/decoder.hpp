#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvep/reconvolution.hpp"

namespace cvep {

// Labeled single-trial recordings. Label 0 is a left cue, 1 a right cue.
struct TrialSet {
    std::vector<Eigen::MatrixXd> trials;  // each C x T
    std::vector<int> labels;
    std::string condition;
    std::vector<std::string> channel_names;
    double rate_hz = kEegRateHz;

    size_t size() const { return trials.size(); }
    long channels() const { return trials.empty() ? 0 : trials[0].rows(); }
    long samples() const { return trials.empty() ? 0 : trials[0].cols(); }
};

void validate(const TrialSet& set);

// Fitted reconvolution CCA model: spatial filter w, concatenated per-event
// transient responses r, and the two class templates' structure matrices.
struct DecoderModel {
    Eigen::VectorXd w;  // C
    Eigen::VectorXd r;  // 3L, sign fixed so the largest-|.| element is positive
    int L = 0;
    StructureMatrix m0, m1;
    double rho_train = 0.0;
    double ridge = 0.0;
    std::vector<std::string> channel_names;
};

constexpr double kDefaultRidge = 1e-9;

// First canonical pair between the horizontally concatenated trials and the
// label-matched structure matrices, both globally row-centered. The
// auto-covariances are regularized with ridge * trace/dim * I and whitened
// by their symmetric inverse square roots; w, r come from the dominant
// singular triplet of the whitened cross-covariance.
DecoderModel fit_reconvolution_cca(const TrialSet& train, const StructureMatrix& m0,
                                   const StructureMatrix& m1, double ridge = kDefaultRidge);

struct Prediction {
    int label = 0;
    std::array<double, 2> scores{};  // Pearson correlation per class template
};

// Correlates the spatially filtered trial with both class templates r'M_i
// and picks the larger (ties toward 0). A zero-variance side scores 0.
Prediction predict_side(const DecoderModel& model, const Eigen::MatrixXd& X);

struct SpatialPattern {
    Eigen::VectorXd a;      // C
    Eigen::MatrixXd sigma;  // C x C spatial covariance of the training data
};

// a = Sigma w with Sigma estimated from the row-centered concatenated
// training trials.
SpatialPattern spatial_pattern(const DecoderModel& model, const TrialSet& train);

Eigen::VectorXd pattern_from_covariance(const Eigen::VectorXd& w, const Eigen::MatrixXd& sigma);

}  // namespace cvep
