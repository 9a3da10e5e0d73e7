#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvep/rng.hpp"

namespace cvep {

enum class Shape { GreenCircle, MagentaHourglass, CyanTriangle, RedRectangle, YellowTriangle };

// magenta_hourglass is the target shape participants count.
constexpr Shape kTargetShape = Shape::MagentaHourglass;

std::string to_string(Shape s);
Shape shape_from_string(const std::string& name);

enum class Side { Left, Right };
enum class Condition { Overt, Covert };

std::string to_string(Side s);
std::string to_string(Condition c);
Side side_from_string(const std::string& name);
Condition condition_from_string(const std::string& name);

constexpr int kSlotRateHz = 4;        // shapes change every 250 ms
constexpr double kTrialSeconds = 20.0;
constexpr int kSlotsPerTrial = 80;    // 20 s * 4 Hz
constexpr int kMinTargetGapSlots = 4; // >= 1 s between target onsets
constexpr int kMaxTargetsPerSide = 20;

struct ShapeTimeline {
    std::vector<Shape> slots;
    int slot_rate_hz = kSlotRateHz;
    double duration_s = kTrialSeconds;

    int target_count() const;
};

struct TrialSpec {
    Side cued_side = Side::Left;
    ShapeTimeline left_timeline;
    ShapeTimeline right_timeline;
    Condition condition = Condition::Covert;
    std::string code_name;  // identifier of the flashing (cued-side) code
};

struct RunPlan {
    Condition condition = Condition::Covert;
    std::vector<TrialSpec> trials;
};

struct SessionPlan {
    std::vector<RunPlan> runs;
    uint64_t rng_seed = 0;

    size_t n_trials() const;
};

constexpr int kRunsPerSession = 5;     // 1 overt + 4 covert
constexpr int kTrialsPerRun = 20;      // 10 per class
constexpr int kMinTargetsPerSide = 2;  // per-side target count drawn from {2..5}
constexpr int kMaxTargetsDrawn = 5;

// 80 slots with n_targets target occurrences spaced >= 4 slots apart
// (uniform over valid placements) and non-target slots drawn uniformly from
// the other four shapes with no immediate repetition.
ShapeTimeline make_shape_timeline(uint64_t rng_seed, int n_targets);
ShapeTimeline make_shape_timeline(Rng& rng, int n_targets);

// Two timelines with differing target counts and no slot where both sides
// show the target. Deterministic in the seed.
TrialSpec make_trial_spec(uint64_t rng_seed, Side cued_side, Condition condition);
TrialSpec make_trial_spec(Rng& rng, Side cued_side, Condition condition);

// 5 runs (1 overt + 4 covert, order seeded) of 20 trials each with exactly
// 10 left and 10 right cues per run in seeded random order.
SessionPlan make_session_plan(uint64_t rng_seed);

// Throws ValidationError if any protocol constraint is violated.
void validate(const ShapeTimeline& tl);
void validate(const TrialSpec& trial);
void validate(const SessionPlan& plan);

}  // namespace cvep
