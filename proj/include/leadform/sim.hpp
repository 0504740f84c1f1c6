#pragma once

#include <optional>
#include <string>
#include <vector>

#include "leadform/spectrum.hpp"
#include "leadform/synthesis.hpp"

namespace leadform {

/// External input to the leader, v_n = gain * (target - x_n) while active.
struct LeaderLaw {
    enum class Mode {
        None,               // v_n = 0 throughout
        Hold,               // leader state pinned to target from t = 0, no input
        Proportional,       // never withdrawn
        WithdrawAt,         // proportional until t >= withdraw_time
        WithdrawOnConverge  // proportional until |target - x_n| < tolerance
    };

    Mode mode = Mode::Proportional;
    double target = 0.0;
    double gain = 1.0;
    double withdraw_time = 0.0;
    double tolerance = 1e-9;

    static LeaderLaw none() { return {Mode::None}; }
    static LeaderLaw hold(double target) { return {Mode::Hold, target}; }
    static LeaderLaw proportional(double target, double gain) { return {Mode::Proportional, target, gain}; }
    static LeaderLaw withdraw_at(double target, double gain, double t_off) {
        return {Mode::WithdrawAt, target, gain, t_off};
    }
    static LeaderLaw withdraw_on_converge(double target, double gain, double tol) {
        return {Mode::WithdrawOnConverge, target, gain, 0.0, tol};
    }
};

struct Trajectory {
    std::string axis = "x";
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<double> input;            // v_n at each sample
    std::optional<double> withdrawn_at;   // first time the input switched off
    std::vector<double> segment_starts;   // time of each segment boundary

    std::size_t samples() const noexcept { return times.size(); }
    const Vector& final_state() const { return states.back(); }
};

/// One stretch of constant closed-loop matrix and leader law.
struct Segment {
    Matrix closed_loop;
    LeaderLaw law;
    double duration = 0.0;
};

/// Largest |dt * lambda| the classic RK4 step tolerates on the real axis.
inline constexpr double kRk4StabilityBound = 2.785;

/// 0.1 / max|lambda|, clamped to [1e-4, 1e-1].
double default_step(const PoleSpec& poles);
/// max|lambda|, so the leader is never the slowest mode.
double default_leader_gain(const PoleSpec& poles);

/// Fixed-step RK4 on dx/dt = A x + e_leader v. The leader is the last agent
/// unless `leader` says otherwise. Throws UnstableStep, DimensionMismatch.
Trajectory simulate(const Matrix& a, const Vector& x0, const LeaderLaw& law, double dt, double horizon, int leader = -1);

/// Segments run back to back with state continuity.
Trajectory simulate_segments(const std::vector<Segment>& segments, const Vector& x0, double dt, int leader = -1);

struct AxisSystem {
    std::string axis;
    std::vector<Segment> segments;
    Vector x0;
};

/// Axes are independent; each is integrated on the same time grid.
std::vector<Trajectory> simulate_nd(const std::vector<AxisSystem>& axes, double dt, int leader = -1);

struct RateFit {
    std::vector<std::optional<double>> per_agent;  // follower decay rates; leader left empty
    double slowest = 0.0;
};

/// Log-linear fit of |x_i - f_i| over the tail of the samples after
/// `window_start` that are above the numerical floor. Throws SignalBelowFloor.
RateFit fit_rates(const Trajectory& traj, const Formation& f, double window_start = 0.0, int leader = -1);

/// ||x - F||_inf < 1e-3 ||F||_inf.
bool settled(const Vector& x, const Formation& f, double rel_tol = 1e-3);

}  // namespace leadform
