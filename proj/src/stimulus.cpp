#include "cvep/stimulus.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "cvep/errors.hpp"

namespace cvep {

std::string to_string(Shape s) {
    switch (s) {
        case Shape::GreenCircle: return "green_circle";
        case Shape::MagentaHourglass: return "magenta_hourglass";
        case Shape::CyanTriangle: return "cyan_triangle";
        case Shape::RedRectangle: return "red_rectangle";
        case Shape::YellowTriangle: return "yellow_triangle";
    }
    throw ValidationError("unknown shape");
}

Shape shape_from_string(const std::string& name) {
    for (Shape s : {Shape::GreenCircle, Shape::MagentaHourglass, Shape::CyanTriangle,
                    Shape::RedRectangle, Shape::YellowTriangle})
        if (to_string(s) == name) return s;
    throw ValidationError("unknown shape name '" + name + "'");
}

std::string to_string(Side s) { return s == Side::Left ? "left" : "right"; }
std::string to_string(Condition c) { return c == Condition::Overt ? "overt" : "covert"; }

Side side_from_string(const std::string& name) {
    if (name == "left") return Side::Left;
    if (name == "right") return Side::Right;
    throw ValidationError("unknown side '" + name + "'");
}

Condition condition_from_string(const std::string& name) {
    if (name == "overt") return Condition::Overt;
    if (name == "covert") return Condition::Covert;
    throw ValidationError("unknown condition '" + name + "'");
}

int ShapeTimeline::target_count() const {
    return static_cast<int>(std::count(slots.begin(), slots.end(), kTargetShape));
}

size_t SessionPlan::n_trials() const {
    size_t n = 0;
    for (const auto& r : runs) n += r.trials.size();
    return n;
}

namespace {

constexpr std::array<Shape, 4> kNonTargetShapes = {Shape::GreenCircle, Shape::CyanTriangle,
                                                   Shape::RedRectangle, Shape::YellowTriangle};

// Sorted target onsets with pairwise gap >= kMinTargetGapSlots, uniform over
// valid placements: sample m distinct slots from a contracted range, then
// re-expand by (gap-1) per index.
std::vector<int> place_targets(Rng& rng, int n_targets) {
    const int gap = kMinTargetGapSlots;
    const int contracted = kSlotsPerTrial - (gap - 1) * (n_targets - 1);
    std::vector<int> pool(contracted);
    std::iota(pool.begin(), pool.end(), 0);
    rng.shuffle(pool);
    std::vector<int> picks(pool.begin(), pool.begin() + n_targets);
    std::sort(picks.begin(), picks.end());
    for (int i = 0; i < n_targets; ++i) picks[i] += (gap - 1) * i;
    return picks;
}

}  // namespace

ShapeTimeline make_shape_timeline(Rng& rng, int n_targets) {
    if (n_targets < 0) throw ValidationError("n_targets must be >= 0");
    if (n_targets > kMaxTargetsPerSide)
        throw ValidationError("cannot place " + std::to_string(n_targets) + " targets with a " +
                              std::to_string(kMinTargetGapSlots) + "-slot spacing in " +
                              std::to_string(kSlotsPerTrial) + " slots");

    std::vector<int> onsets = n_targets > 0 ? place_targets(rng, n_targets) : std::vector<int>{};

    ShapeTimeline tl;
    tl.slots.resize(kSlotsPerTrial, kTargetShape);
    size_t next_onset = 0;
    Shape prev = kTargetShape;  // sentinel; never collides with non-target choices
    for (int i = 0; i < kSlotsPerTrial; ++i) {
        if (next_onset < onsets.size() && onsets[next_onset] == i) {
            ++next_onset;
            prev = kTargetShape;
            continue;
        }
        // uniform over the four non-target shapes, excluding the previous slot's shape
        Shape pick;
        do {
            pick = kNonTargetShapes[rng.below(kNonTargetShapes.size())];
        } while (pick == prev);
        tl.slots[i] = pick;
        prev = pick;
    }
    return tl;
}

ShapeTimeline make_shape_timeline(uint64_t rng_seed, int n_targets) {
    Rng rng(mix_seed(rng_seed));
    return make_shape_timeline(rng, n_targets);
}

TrialSpec make_trial_spec(Rng& rng, Side cued_side, Condition condition) {
    int n_left, n_right;
    do {
        n_left = rng.range_int(kMinTargetsPerSide, kMaxTargetsDrawn);
        n_right = rng.range_int(kMinTargetsPerSide, kMaxTargetsDrawn);
    } while (n_left == n_right);

    TrialSpec trial;
    trial.cued_side = cued_side;
    trial.condition = condition;
    trial.code_name = to_string(cued_side);
    trial.left_timeline = make_shape_timeline(rng, n_left);

    // resample the right side until no slot shows the target bilaterally
    for (int attempt = 0; attempt < 1000; ++attempt) {
        trial.right_timeline = make_shape_timeline(rng, n_right);
        bool clash = false;
        for (int i = 0; i < kSlotsPerTrial; ++i)
            if (trial.left_timeline.slots[i] == kTargetShape &&
                trial.right_timeline.slots[i] == kTargetShape) {
                clash = true;
                break;
            }
        if (!clash) return trial;
    }
    throw std::runtime_error("failed to place non-overlapping targets after 1000 attempts");
}

TrialSpec make_trial_spec(uint64_t rng_seed, Side cued_side, Condition condition) {
    Rng rng(mix_seed(rng_seed));
    return make_trial_spec(rng, cued_side, condition);
}

SessionPlan make_session_plan(uint64_t rng_seed) {
    Rng rng(mix_seed(rng_seed, 0x5e551021));

    std::vector<Condition> order(kRunsPerSession, Condition::Covert);
    order[0] = Condition::Overt;
    rng.shuffle(order);

    SessionPlan plan;
    plan.rng_seed = rng_seed;
    for (Condition cond : order) {
        RunPlan run;
        run.condition = cond;
        std::vector<Side> cues(kTrialsPerRun / 2, Side::Left);
        cues.resize(kTrialsPerRun, Side::Right);
        rng.shuffle(cues);
        for (Side side : cues) run.trials.push_back(make_trial_spec(rng, side, cond));
        plan.runs.push_back(std::move(run));
    }
    validate(plan);
    return plan;
}

void validate(const ShapeTimeline& tl) {
    if (static_cast<int>(tl.slots.size()) != kSlotsPerTrial)
        throw ValidationError("timeline must have exactly " + std::to_string(kSlotsPerTrial) + " slots");
    int prev_onset = -kMinTargetGapSlots;
    for (int i = 0; i < kSlotsPerTrial; ++i) {
        if (tl.slots[i] != kTargetShape) continue;
        if (i - prev_onset < kMinTargetGapSlots && prev_onset >= 0)
            throw ValidationError("target onsets closer than the 1 s minimum spacing");
        prev_onset = i;
    }
}

void validate(const TrialSpec& trial) {
    validate(trial.left_timeline);
    validate(trial.right_timeline);
    if (trial.left_timeline.target_count() == trial.right_timeline.target_count())
        throw ValidationError("target counts must differ between sides");
    for (int i = 0; i < kSlotsPerTrial; ++i)
        if (trial.left_timeline.slots[i] == kTargetShape && trial.right_timeline.slots[i] == kTargetShape)
            throw ValidationError("target shown on both sides in slot " + std::to_string(i));
}

void validate(const SessionPlan& plan) {
    if (static_cast<int>(plan.runs.size()) != kRunsPerSession)
        throw ValidationError("session must have exactly " + std::to_string(kRunsPerSession) + " runs");
    int overt_runs = 0;
    for (const auto& run : plan.runs) {
        if (run.condition == Condition::Overt) ++overt_runs;
        if (static_cast<int>(run.trials.size()) != kTrialsPerRun)
            throw ValidationError("each run must have exactly " + std::to_string(kTrialsPerRun) + " trials");
        int left = 0;
        for (const auto& t : run.trials) {
            if (t.cued_side == Side::Left) ++left;
            if (t.condition != run.condition)
                throw ValidationError("trial condition differs from its run condition");
            validate(t);
        }
        if (left != kTrialsPerRun / 2)
            throw ValidationError("run must have exactly " + std::to_string(kTrialsPerRun / 2) +
                                  " left-cued trials");
    }
    if (overt_runs != 1) throw ValidationError("session must have exactly one overt run");
}

}  // namespace cvep
