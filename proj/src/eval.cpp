#include "cvep/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cvep/errors.hpp"
#include "cvep/io.hpp"

namespace cvep {

FoldAssignment chronological_folds(long n_trials, int k) {
    if (k < 2) throw ValidationError("need at least 2 folds");
    if (n_trials < k)
        throw ValidationError("cannot split " + std::to_string(n_trials) + " trials into " +
                              std::to_string(k) + " folds");
    FoldAssignment fa;
    fa.k = k;
    fa.fold_of_trial.reserve(static_cast<size_t>(n_trials));
    const long base = n_trials / k;
    const long rem = n_trials % k;
    for (int f = 0; f < k; ++f) {
        const long size = base + (f < rem ? 1 : 0);
        fa.fold_of_trial.insert(fa.fold_of_trial.end(), static_cast<size_t>(size), f);
    }
    return fa;
}

double permutation_pvalue(const std::vector<int>& predictions, const std::vector<int>& labels,
                          int n_perm, Rng& rng) {
    if (predictions.empty() || predictions.size() != labels.size())
        throw ValidationError("predictions and labels must be non-empty and equal-sized");
    if (n_perm <= 0) return 1.0;

    const auto correct = [&predictions](const std::vector<int>& y) {
        long c = 0;
        for (size_t i = 0; i < y.size(); ++i) c += predictions[i] == y[i];
        return c;
    };
    const long observed = correct(labels);
    std::vector<int> shuffled = labels;
    long at_least = 0;
    for (int p = 0; p < n_perm; ++p) {
        rng.shuffle(shuffled);
        at_least += correct(shuffled) >= observed;
    }
    return static_cast<double>(1 + at_least) / static_cast<double>(1 + n_perm);
}

EvalResult cross_validate(const TrialSet& data, const BitSequence& left_code,
                          const BitSequence& right_code, int l_samples, double ridge, int k,
                          int n_perm, uint64_t perm_seed) {
    validate(data);
    const long n = static_cast<long>(data.size());
    const FoldAssignment folds = chronological_folds(n, k);

    const double duration_s = static_cast<double>(data.samples()) / data.rate_hz;
    const StructureMatrix m0 = structure_for_code(left_code, duration_s, l_samples, data.rate_hz);
    const StructureMatrix m1 = structure_for_code(right_code, duration_s, l_samples, data.rate_hz);

    EvalResult res;
    res.l_samples = l_samples;
    res.length_s = l_samples / data.rate_hz;
    res.ridge = ridge;
    res.k = k;
    res.condition = data.condition;
    res.predictions.assign(static_cast<size_t>(n), -1);
    res.scores.assign(static_cast<size_t>(n), {0.0, 0.0});

    for (int f = 0; f < k; ++f) {
        TrialSet train;
        train.condition = data.condition;
        train.channel_names = data.channel_names;
        train.rate_hz = data.rate_hz;
        std::vector<long> test_idx;
        for (long j = 0; j < n; ++j) {
            if (folds.fold_of_trial[static_cast<size_t>(j)] == f) {
                test_idx.push_back(j);
            } else {
                train.trials.push_back(data.trials[static_cast<size_t>(j)]);
                train.labels.push_back(data.labels[static_cast<size_t>(j)]);
            }
        }
        const long ones = std::count(train.labels.begin(), train.labels.end(), 1);
        if (ones == 0 || ones == static_cast<long>(train.labels.size()))
            throw ValidationError("training folds for held-out fold " + std::to_string(f) +
                                  " contain a single class");

        const DecoderModel model = fit_reconvolution_cca(train, m0, m1, ridge);
        long hits = 0;
        for (long j : test_idx) {
            const Prediction p = predict_side(model, data.trials[static_cast<size_t>(j)]);
            res.predictions[static_cast<size_t>(j)] = p.label;
            res.scores[static_cast<size_t>(j)] = p.scores;
            hits += p.label == data.labels[static_cast<size_t>(j)];
        }
        res.fold_accuracies.push_back(static_cast<double>(hits) /
                                      static_cast<double>(test_idx.size()));
    }

    res.mean_accuracy = 0.0;
    for (double a : res.fold_accuracies) res.mean_accuracy += a;
    res.mean_accuracy /= static_cast<double>(res.fold_accuracies.size());

    Rng rng(mix_seed(perm_seed, 0x9e4a));
    res.p_value = permutation_pvalue(res.predictions, data.labels, n_perm, rng);
    return res;
}

std::vector<double> default_sweep_lengths() {
    std::vector<double> lengths;
    for (int i = 1; i <= 9; ++i) lengths.push_back(i / 10.0);
    return lengths;
}

std::vector<SweepPoint> sweep_response_length(const TrialSet& data, const BitSequence& left_code,
                                              const BitSequence& right_code,
                                              const std::vector<double>& lengths_s, double ridge,
                                              int k, int n_perm, uint64_t perm_seed) {
    if (lengths_s.empty()) throw ValidationError("length grid is empty");
    std::vector<SweepPoint> curve;
    curve.reserve(lengths_s.size());
    for (size_t i = 0; i < lengths_s.size(); ++i) {
        const double len = lengths_s[i];
        const double samples_f = len * data.rate_hz;
        const long samples = std::lround(samples_f);
        if (samples < 1 || std::abs(samples_f - static_cast<double>(samples)) > 1e-9)
            throw ValidationError("length " + std::to_string(len) +
                                  " s does not map to a whole sample count");
        SweepPoint pt;
        pt.length_s = len;
        pt.result = cross_validate(data, left_code, right_code, static_cast<int>(samples), ridge,
                                   k, n_perm, mix_seed(perm_seed, 0x5eeb + i));
        pt.result.length_s = len;
        curve.push_back(std::move(pt));
    }
    return curve;
}

std::string curve_to_csv(const std::vector<SweepPoint>& curve) {
    std::string out = "length_s,fold,accuracy,mean_accuracy,p_value\n";
    for (const auto& pt : curve) {
        for (size_t f = 0; f < pt.result.fold_accuracies.size(); ++f) {
            out += format_double(pt.length_s);
            out += ',';
            out += std::to_string(f);
            out += ',';
            out += format_double(pt.result.fold_accuracies[f]);
            out += ',';
            out += format_double(pt.result.mean_accuracy);
            out += ',';
            out += format_double(pt.result.p_value);
            out += '\n';
        }
    }
    return out;
}

std::vector<SweepPoint> curve_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "length_s,fold,accuracy,mean_accuracy,p_value")
        throw ValidationError("unrecognized curve CSV header");
    std::vector<SweepPoint> curve;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<std::string, 5> field;
        size_t pos = 0;
        for (int i = 0; i < 5; ++i) {
            const size_t comma = line.find(',', pos);
            if (i < 4 && comma == std::string::npos)
                throw ValidationError("malformed curve CSV row: " + line);
            field[static_cast<size_t>(i)] =
                line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            pos = comma + 1;
        }
        const double len = std::stod(field[0]);
        if (curve.empty() || curve.back().length_s != len) {
            curve.push_back({len, {}});
            curve.back().result.length_s = len;
        }
        curve.back().result.fold_accuracies.push_back(std::stod(field[2]));
        curve.back().result.mean_accuracy = std::stod(field[3]);
        curve.back().result.p_value = std::stod(field[4]);
    }
    if (curve.empty()) throw ValidationError("curve CSV has no data rows");
    return curve;
}

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_sweep_svg(const std::vector<NamedCurve>& curves) {
    if (curves.empty()) throw ValidationError("no curves to plot");
    double x_min = 1e30, x_max = -1e30;
    for (const auto& c : curves)
        for (const auto& pt : c.points) {
            x_min = std::min(x_min, pt.length_s);
            x_max = std::max(x_max, pt.length_s);
        }
    if (x_min >= x_max) {
        x_min -= 0.05;
        x_max += 0.05;
    }

    const double w = 640, h = 420, ml = 64, mr = 24, mt = 24, mb = 56;
    const double pw = w - ml - mr, ph = h - mt - mb;
    const auto sx = [&](double v) { return ml + (v - x_min) / (x_max - x_min) * pw; };
    const auto sy = [&](double v) { return mt + (1.0 - v) * ph; };
    static const char* kColors[] = {"#1f6fb4", "#c23b3b", "#2c8a4b", "#8a5bb4", "#b08a2c"};

    char buf[256];
    std::string svg;
    const auto add = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof buf, fmt, args...);
        svg += buf;
    };

    add("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
        "viewBox=\"0 0 %.0f %.0f\" font-family=\"sans-serif\" font-size=\"12\">\n",
        w, h, w, h);
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (int i = 0; i <= 5; ++i) {
        const double v = i / 5.0;
        add("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n", ml, sy(v),
            ml + pw, sy(v));
        add("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.1f</text>\n", ml - 8, sy(v) + 4, v);
    }
    for (double v = std::ceil(x_min * 10) / 10; v <= x_max + 1e-9; v += 0.1) {
        add("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#eee\"/>\n", sx(v), mt,
            sx(v), mt + ph);
        add("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.1f</text>\n", sx(v), mt + ph + 18,
            v);
    }

    add("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#888\" "
        "stroke-dasharray=\"6 4\"/>\n",
        ml, sy(0.5), ml + pw, sy(0.5));
    add("<text x=\"%.1f\" y=\"%.1f\" fill=\"#888\">chance</text>\n", ml + 6, sy(0.5) - 6);
    if (x_min <= 0.3 && 0.3 <= x_max) {
        add("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#888\" "
            "stroke-dasharray=\"2 4\"/>\n",
            sx(0.3), mt, sx(0.3), mt + ph);
        add("<text x=\"%.1f\" y=\"%.1f\" fill=\"#888\" text-anchor=\"middle\">0.3 s</text>\n",
            sx(0.3), mt - 6);
    }

    for (size_t ci = 0; ci < curves.size(); ++ci) {
        const char* color = kColors[ci % 5];
        std::string pts;
        for (const auto& pt : curves[ci].points) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(pt.length_s),
                          sy(pt.result.mean_accuracy));
            pts += buf;
        }
        add("<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" stroke-width=\"2\"/>\n",
            pts.c_str(), color);
        for (const auto& pt : curves[ci].points)
            add("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", sx(pt.length_s),
                sy(pt.result.mean_accuracy), color);
        add("<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">%s</text>\n", ml + pw - 150,
            mt + 18 + 16 * static_cast<double>(ci), color, escape_xml(curves[ci].label).c_str());
    }

    add("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">transient response length (s)</text>\n",
        ml + pw / 2, h - 16);
    add("<text x=\"16\" y=\"%.1f\" text-anchor=\"middle\" transform=\"rotate(-90 16 %.1f)\">"
        "mean accuracy</text>\n",
        mt + ph / 2, mt + ph / 2);
    svg += "</svg>\n";
    return svg;
}

}  // namespace cvep
