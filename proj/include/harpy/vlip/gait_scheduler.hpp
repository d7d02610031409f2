#pragma once

#include <limits>
#include <stdexcept>

#include "harpy/kinematics/morphology.hpp"

namespace harpy::vlip {

using kinematics::Side;

struct SchedulerConfig {
    double step_period = 0.4;
    double min_stance_time = 0.15;  // contact events earlier than this are chatter
    double airborne_grace = 0.2;
    Side initial_stance = Side::left;
};

struct GaitPhase {
    Side stance = Side::left;
    Side swing = Side::right;
    double phase = 0.0;  // time in stance / step period, clamped to [0, 1]
    double time_in_stance = 0.0;
    bool step_event = false;      // stance toggled on this update
    bool airborne_fault = false;  // both feet off the ground longer than the grace period
    int steps = 0;
};

/// Alternates stance and swing on swing-foot touchdown.
class GaitScheduler {
public:
    explicit GaitScheduler(const SchedulerConfig& config, double start_time = 0.0);

    /// Advances to time t (must not decrease) with the current contact flags.
    GaitPhase update(double t, bool left_contact, bool right_contact);

    const GaitPhase& current() const { return state_; }
    double stance_start() const { return stance_start_; }

private:
    SchedulerConfig config_;
    GaitPhase state_;
    double last_time_;
    double stance_start_;
    double airborne_since_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace harpy::vlip
