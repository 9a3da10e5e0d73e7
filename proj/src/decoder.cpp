#include "cvep/decoder.hpp"

#include <algorithm>
#include <cmath>

#include "cvep/errors.hpp"

namespace cvep {

void validate(const TrialSet& set) {
    if (set.trials.size() != set.labels.size())
        throw ValidationError("trial and label counts differ");
    if (!set.trials.empty()) {
        const long C = set.trials[0].rows();
        const long T = set.trials[0].cols();
        if (C < 1 || T < 1) throw ValidationError("empty trial matrix");
        for (const auto& x : set.trials)
            if (x.rows() != C || x.cols() != T)
                throw ValidationError("trials do not share channel/sample dimensions");
        if (!set.channel_names.empty() && static_cast<long>(set.channel_names.size()) != C)
            throw ValidationError("channel name count does not match the data");
    }
    for (int y : set.labels)
        if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
}

namespace {

// Symmetric inverse square root of A + ridge*I. Throws if the regularized
// matrix is still numerically singular.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& a, double ridge, const char* which) {
    Eigen::MatrixXd reg = a;
    reg.diagonal().array() += ridge;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reg);
    if (es.info() != Eigen::Success)
        throw std::runtime_error(std::string("eigendecomposition failed for ") + which);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double lmax = ev.maxCoeff();
    if (lmax <= 0 || ev.minCoeff() <= lmax * 1e-14)
        throw ValidationError(std::string(which) +
                              " covariance is rank deficient after ridge; whitening is singular");
    return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ac = a.array() - a.mean();
    const Eigen::VectorXd bc = b.array() - b.mean();
    const double na = ac.norm(), nb = bc.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return ac.dot(bc) / (na * nb);
}

}  // namespace

DecoderModel fit_reconvolution_cca(const TrialSet& train, const StructureMatrix& m0,
                                   const StructureMatrix& m1, double ridge) {
    validate(train);
    if (train.size() < 2) throw ValidationError("need at least 2 training trials");
    if (ridge < 0) throw ValidationError("ridge must be non-negative");
    const long n1 = std::count(train.labels.begin(), train.labels.end(), 1);
    const long n0 = static_cast<long>(train.size()) - n1;
    if (n0 == 0 || n1 == 0) throw ValidationError("training data must contain both classes");

    const long C = train.channels();
    const long T = train.samples();
    const long M = m0.rows();
    if (m0.cols() != T || m1.cols() != T)
        throw ValidationError("structure matrix width does not match trial length");
    if (m0.L != m1.L) throw ValidationError("structure matrices have different response lengths");

    // Per-class sums make the cross terms cheap: trials of one class share
    // their structure matrix, so sum_j X_j M_{y_j}' collapses to two products.
    const long J = static_cast<long>(train.size());
    const double JT = static_cast<double>(J) * static_cast<double>(T);
    Eigen::MatrixXd gxx = Eigen::MatrixXd::Zero(C, C);
    Eigen::MatrixXd xsum0 = Eigen::MatrixXd::Zero(C, T);
    Eigen::MatrixXd xsum1 = Eigen::MatrixXd::Zero(C, T);
    for (size_t j = 0; j < train.size(); ++j) {
        const Eigen::MatrixXd& x = train.trials[j];
        gxx.selfadjointView<Eigen::Lower>().rankUpdate(x);
        (train.labels[j] == 0 ? xsum0 : xsum1) += x;
    }
    gxx = gxx.selfadjointView<Eigen::Lower>();

    const Eigen::VectorXd mu_x = (xsum0 + xsum1).rowwise().sum() / JT;
    const Eigen::VectorXd mu_y =
        (static_cast<double>(n0) * m0.data.rowwise().sum() +
         static_cast<double>(n1) * m1.data.rowwise().sum()) /
        JT;

    const Eigen::MatrixXd cxx = gxx - JT * mu_x * mu_x.transpose();
    const Eigen::MatrixXd cxy = xsum0 * m0.data.transpose() + xsum1 * m1.data.transpose() -
                                JT * mu_x * mu_y.transpose();
    const Eigen::MatrixXd cyy =
        static_cast<double>(n0) * m0.data * m0.data.transpose() +
        static_cast<double>(n1) * m1.data * m1.data.transpose() -
        JT * mu_y * mu_y.transpose();

    const Eigen::MatrixXd wx =
        inverse_sqrt(cxx, ridge * cxx.trace() / static_cast<double>(C), "signal");
    const Eigen::MatrixXd wy =
        inverse_sqrt(cyy, ridge * cyy.trace() / static_cast<double>(M), "design");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(wx * cxy * wy, Eigen::ComputeThinU | Eigen::ComputeThinV);

    DecoderModel model;
    model.w = wx * svd.matrixU().col(0);
    model.r = wy * svd.matrixV().col(0);
    model.L = m0.L;
    model.m0 = m0;
    model.m1 = m1;
    model.ridge = ridge;
    model.rho_train = std::clamp(svd.singularValues()(0), 0.0, 1.0);
    model.channel_names = train.channel_names;

    Eigen::Index peak;
    model.r.cwiseAbs().maxCoeff(&peak);
    if (model.r(peak) < 0) {
        model.w = -model.w;
        model.r = -model.r;
    }
    return model;
}

Prediction predict_side(const DecoderModel& model, const Eigen::MatrixXd& X) {
    if (X.rows() != model.w.size())
        throw ValidationError("trial has " + std::to_string(X.rows()) + " channels, model expects " +
                              std::to_string(model.w.size()));
    if (X.cols() != model.m0.cols())
        throw ValidationError("trial has " + std::to_string(X.cols()) + " samples, model expects " +
                              std::to_string(model.m0.cols()));
    const Eigen::VectorXd filtered = X.transpose() * model.w;
    Prediction p;
    p.scores[0] = pearson(filtered, model.m0.data.transpose() * model.r);
    p.scores[1] = pearson(filtered, model.m1.data.transpose() * model.r);
    p.label = p.scores[1] > p.scores[0] ? 1 : 0;
    return p;
}

SpatialPattern spatial_pattern(const DecoderModel& model, const TrialSet& train) {
    validate(train);
    if (train.size() == 0) throw ValidationError("empty training set");
    if (train.channels() != model.w.size())
        throw ValidationError("training data does not match the model's channel count");

    const long T = train.samples();
    const double JT = static_cast<double>(train.size()) * static_cast<double>(T);
    Eigen::MatrixXd gxx = Eigen::MatrixXd::Zero(train.channels(), train.channels());
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(train.channels());
    for (const auto& x : train.trials) {
        gxx.selfadjointView<Eigen::Lower>().rankUpdate(x);
        rowsum += x.rowwise().sum();
    }
    gxx = gxx.selfadjointView<Eigen::Lower>();
    const Eigen::VectorXd mu = rowsum / JT;

    SpatialPattern sp;
    sp.sigma = (gxx - JT * mu * mu.transpose()) / (JT - 1.0);
    sp.a = sp.sigma * model.w;
    return sp;
}

Eigen::VectorXd pattern_from_covariance(const Eigen::VectorXd& w, const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() != w.size())
        throw ValidationError("covariance and filter dimensions do not match");
    return sigma * w;
}

}  // namespace cvep
