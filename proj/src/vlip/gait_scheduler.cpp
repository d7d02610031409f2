#include "harpy/vlip/gait_scheduler.hpp"

#include <algorithm>
#include <cmath>

namespace harpy::vlip {

namespace {
constexpr double kTimeTol = 1e-9;
}

GaitScheduler::GaitScheduler(const SchedulerConfig& config, double start_time)
    : config_(config), last_time_(start_time), stance_start_(start_time)
{
    if (!(config.step_period > 0.0)) {
        throw std::invalid_argument("step_period must be > 0");
    }
    state_.stance = config.initial_stance;
    state_.swing = kinematics::other(config.initial_stance);
}

GaitPhase GaitScheduler::update(double t, bool left_contact, bool right_contact)
{
    if (t < last_time_ - kTimeTol) {
        throw std::invalid_argument("gait scheduler clock went backwards");
    }
    last_time_ = t;
    state_.step_event = false;

    const bool swing_contact = state_.swing == Side::left ? left_contact : right_contact;
    if (swing_contact && t - stance_start_ >= config_.min_stance_time - kTimeTol) {
        std::swap(state_.stance, state_.swing);
        stance_start_ = t;
        state_.step_event = true;
        ++state_.steps;
    }

    if (!left_contact && !right_contact) {
        if (std::isnan(airborne_since_)) {
            airborne_since_ = t;
        }
        state_.airborne_fault = t - airborne_since_ >= config_.airborne_grace - kTimeTol;
    } else {
        airborne_since_ = std::numeric_limits<double>::quiet_NaN();
        state_.airborne_fault = false;
    }

    state_.time_in_stance = t - stance_start_;
    state_.phase = std::clamp(state_.time_in_stance / config_.step_period, 0.0, 1.0);
    return state_;
}

}  // namespace harpy::vlip
