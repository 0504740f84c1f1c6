#include "leadform/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "leadform/errors.hpp"

namespace leadform {

double default_leader_gain(const PoleSpec& poles) {
    double m = 0.0;
    for (double l : poles.lambdas) m = std::max(m, std::abs(l));
    return m > 0.0 ? m : 1.0;
}

double default_step(const PoleSpec& poles) {
    return std::clamp(0.1 / default_leader_gain(poles), 1e-4, 1e-1);
}

namespace {

bool input_active(const LeaderLaw& law) {
    return law.mode == LeaderLaw::Mode::Proportional || law.mode == LeaderLaw::Mode::WithdrawAt ||
           law.mode == LeaderLaw::Mode::WithdrawOnConverge;
}

void check_step(const Matrix& a, const LeaderLaw& law, double dt, Eigen::Index leader) {
    Matrix driven = a;
    if (input_active(law)) driven(leader, leader) -= law.gain;
    double radius = 0.0;
    for (const auto& z : spectrum(driven)) radius = std::max(radius, std::abs(z));
    if (dt * radius > kRk4StabilityBound) {
        throw Error(ErrorCode::UnstableStep, "dt = " + std::to_string(dt) + " with spectral radius " + std::to_string(radius) +
                                                 " exceeds the RK4 bound " + std::to_string(kRk4StabilityBound));
    }
}

// Runs one segment starting from the last sample already in `traj`.
void integrate(Trajectory& traj, const Segment& seg, double dt, Eigen::Index leader) {
    const Matrix& a = seg.closed_loop;
    const LeaderLaw& law = seg.law;
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw Error(ErrorCode::NonSquare, "closed-loop matrix must be square");
    if (traj.states.back().size() != n) throw Error(ErrorCode::DimensionMismatch, "state size does not match the matrix");
    if (law.mode != LeaderLaw::Mode::None && law.mode != LeaderLaw::Mode::Hold && law.gain <= 0.0) {
        throw Error(ErrorCode::DimensionMismatch, "leader gain must be positive");
    }
    check_step(a, law, dt, leader);

    if (law.mode == LeaderLaw::Mode::Hold) traj.states.back()(leader) = law.target;

    bool active = input_active(law);
    auto rhs = [&](const Vector& x) {
        Vector dx = a * x;
        if (active) dx(leader) += law.gain * (law.target - x(leader));
        return dx;
    };
    auto input_at = [&](const Vector& x) { return active ? law.gain * (law.target - x(leader)) : 0.0; };

    const double t0 = traj.times.back();
    const auto steps = static_cast<long>(std::ceil(seg.duration / dt - 1e-9));
    traj.segment_starts.push_back(t0);
    traj.input.back() = input_at(traj.states.back());

    Vector x = traj.states.back();
    for (long k = 1; k <= steps; ++k) {
        if (active) {
            const double t = traj.times.back();
            const bool off = (law.mode == LeaderLaw::Mode::WithdrawAt && t >= law.withdraw_time - 1e-12) ||
                             (law.mode == LeaderLaw::Mode::WithdrawOnConverge && std::abs(law.target - x(leader)) < law.tolerance);
            if (off) {
                active = false;
                if (!traj.withdrawn_at) traj.withdrawn_at = t;
                traj.input.back() = 0.0;
            }
        }
        Vector k1 = rhs(x);
        Vector k2 = rhs(x + 0.5 * dt * k1);
        Vector k3 = rhs(x + 0.5 * dt * k2);
        Vector k4 = rhs(x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        traj.times.push_back(t0 + static_cast<double>(k) * dt);
        traj.states.push_back(x);
        traj.input.push_back(input_at(x));
    }
}

}  // namespace

Trajectory simulate_segments(const std::vector<Segment>& segments, const Vector& x0, double dt, int leader) {
    if (!(dt > 0.0)) throw Error(ErrorCode::UnstableStep, "dt must be positive");
    if (segments.empty()) throw Error(ErrorCode::DimensionMismatch, "no segments to simulate");
    const Eigen::Index n = segments.front().closed_loop.rows();
    if (x0.size() != n) throw Error(ErrorCode::DimensionMismatch, "initial state has " + std::to_string(x0.size()) +
                                                                      " entries for " + std::to_string(n) + " agents");
    const Eigen::Index lead = leader < 0 ? n - 1 : leader - 1;
    if (lead < 0 || lead >= n) throw Error(ErrorCode::IndexOutOfRange, "leader outside the state");

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    traj.input.push_back(0.0);
    for (const auto& seg : segments) {
        if (seg.closed_loop.rows() != n) throw Error(ErrorCode::DimensionMismatch, "segments disagree on agent count");
        integrate(traj, seg, dt, lead);
    }
    return traj;
}

Trajectory simulate(const Matrix& a, const Vector& x0, const LeaderLaw& law, double dt, double horizon, int leader) {
    return simulate_segments({Segment{a, law, horizon}}, x0, dt, leader);
}

std::vector<Trajectory> simulate_nd(const std::vector<AxisSystem>& axes, double dt, int leader) {
    std::vector<Trajectory> out;
    out.reserve(axes.size());
    for (const auto& axis : axes) {
        if (!out.empty() && axis.x0.size() != out.front().states.front().size()) {
            throw Error(ErrorCode::DimensionMismatch, "axes disagree on agent count");
        }
        auto traj = simulate_segments(axis.segments, axis.x0, dt, leader);
        traj.axis = axis.axis;
        out.push_back(std::move(traj));
    }
    return out;
}

RateFit fit_rates(const Trajectory& traj, const Formation& f, double window_start, int leader) {
    const auto n = static_cast<Eigen::Index>(f.size());
    if (traj.states.empty() || traj.states.front().size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "trajectory and formation disagree on agent count");
    }
    const Eigen::Index lead = leader < 0 ? n - 1 : leader - 1;
    const double floor = 1e-9 * std::max(1.0, f.as_vector().cwiseAbs().maxCoeff());

    RateFit fit;
    fit.per_agent.assign(static_cast<std::size_t>(n), std::nullopt);
    bool any = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i == lead) continue;
        std::vector<std::size_t> usable;
        for (std::size_t k = 0; k < traj.samples(); ++k) {
            if (traj.times[k] < window_start) continue;
            if (std::abs(traj.states[k](i) - f.f[static_cast<std::size_t>(i)]) > floor) usable.push_back(k);
        }
        if (usable.size() < 8) continue;
        // Tail: the later half of the above-floor samples.
        std::vector<std::size_t> tail(usable.begin() + static_cast<long>(usable.size() / 2), usable.end());
        double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
        for (auto k : tail) {
            double t = traj.times[k];
            double y = std::log(std::abs(traj.states[k](i) - f.f[static_cast<std::size_t>(i)]));
            st += t;
            sy += y;
            stt += t * t;
            sty += t * y;
        }
        const double m = static_cast<double>(tail.size());
        const double denom = m * stt - st * st;
        if (denom <= 0.0) continue;
        fit.per_agent[static_cast<std::size_t>(i)] = -(m * sty - st * sy) / denom;
        any = true;
    }
    if (!any) throw Error(ErrorCode::SignalBelowFloor, "no follower error above the numerical floor");
    fit.slowest = std::numeric_limits<double>::infinity();
    for (const auto& r : fit.per_agent) {
        if (r) fit.slowest = std::min(fit.slowest, *r);
    }
    return fit;
}

bool settled(const Vector& x, const Formation& f, double rel_tol) {
    const Vector target = f.as_vector();
    return (x - target).cwiseAbs().maxCoeff() < rel_tol * target.cwiseAbs().maxCoeff();
}

}  // namespace leadform
