#include "leadform/export.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "leadform/errors.hpp"

namespace leadform {

namespace {

std::string num(double v, const char* fmt = "%.10g") {
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), fmt, v);
    return buf.data();
}

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

struct Frame {
    double x0, x1, y0, y1;
    static constexpr double kWidth = 640, kHeight = 420, kMargin = 50;

    double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
    double py(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

Frame make_frame(double x0, double x1, double y0, double y1) {
    if (x1 - x0 <= 0) x1 = x0 + 1;
    if (y1 - y0 <= 0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    double pad = 0.05 * (y1 - y0);
    return {x0, x1, y0 - pad, y1 + pad};
}

void open_svg(std::ostringstream& os, const Frame& fr, const std::string& title) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::kWidth << "\" height=\"" << Frame::kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << Frame::kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
    os << "<rect x=\"" << Frame::kMargin << "\" y=\"" << Frame::kMargin << "\" width=\"" << Frame::kWidth - 2 * Frame::kMargin
       << "\" height=\"" << Frame::kHeight - 2 * Frame::kMargin << "\" fill=\"none\" stroke=\"#888\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        double xv = fr.x0 + (fr.x1 - fr.x0) * k / 4.0;
        double yv = fr.y0 + (fr.y1 - fr.y0) * k / 4.0;
        os << "<text x=\"" << num(fr.px(xv), "%.2f") << "\" y=\"" << Frame::kHeight - Frame::kMargin + 16
           << "\" text-anchor=\"middle\">" << num(xv, "%.3g") << "</text>\n";
        os << "<text x=\"" << Frame::kMargin - 6 << "\" y=\"" << num(fr.py(yv) + 4, "%.2f") << "\" text-anchor=\"end\">"
           << num(yv, "%.3g") << "</text>\n";
    }
}

// Keeps polylines small for long runs.
std::size_t stride_for(std::size_t samples) { return std::max<std::size_t>(1, samples / 800); }

}  // namespace

void write_csv(std::ostream& os, const Trajectory& traj) {
    if (traj.states.empty()) return;
    const auto n = traj.states.front().size();
    os << "t";
    for (Eigen::Index i = 0; i < n; ++i) os << ",agent_" << i + 1;
    os << "\n";
    for (std::size_t k = 0; k < traj.samples(); ++k) {
        os << num(traj.times[k]);
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << num(traj.states[k](i));
        os << "\n";
    }
}

std::string svg_time_plot(const Trajectory& traj, const std::string& title) {
    if (traj.states.empty()) throw Error(ErrorCode::DimensionMismatch, "empty trajectory");
    const auto n = traj.states.front().size();
    double lo = traj.states.front().minCoeff(), hi = traj.states.front().maxCoeff();
    for (const auto& s : traj.states) {
        lo = std::min(lo, s.minCoeff());
        hi = std::max(hi, s.maxCoeff());
    }
    auto fr = make_frame(traj.times.front(), traj.times.back(), lo, hi);
    std::ostringstream os;
    open_svg(os, fr, title);
    const auto stride = stride_for(traj.samples());
    for (Eigen::Index i = 0; i < n; ++i) {
        os << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kPalette[static_cast<std::size_t>(i) % kPalette.size()]
           << "\" points=\"";
        for (std::size_t k = 0; k < traj.samples(); k += stride) {
            os << num(fr.px(traj.times[k]), "%.2f") << ',' << num(fr.py(traj.states[k](i)), "%.2f") << ' ';
        }
        os << num(fr.px(traj.times.back()), "%.2f") << ',' << num(fr.py(traj.states.back()(i)), "%.2f");
        os << "\"/>\n";
        os << "<text x=\"" << Frame::kWidth - Frame::kMargin + 4 << "\" y=\"" << num(fr.py(traj.states.back()(i)) + 4, "%.2f")
           << "\" fill=\"" << kPalette[static_cast<std::size_t>(i) % kPalette.size()] << "\">" << i + 1 << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_path_plot(const Trajectory& x, const Trajectory& y, const std::string& title) {
    if (x.samples() != y.samples() || x.samples() == 0) {
        throw Error(ErrorCode::DimensionMismatch, "path plot needs two trajectories on the same time grid");
    }
    const auto n = x.states.front().size();
    double xlo = x.states.front().minCoeff(), xhi = x.states.front().maxCoeff();
    double ylo = y.states.front().minCoeff(), yhi = y.states.front().maxCoeff();
    for (std::size_t k = 0; k < x.samples(); ++k) {
        xlo = std::min(xlo, x.states[k].minCoeff());
        xhi = std::max(xhi, x.states[k].maxCoeff());
        ylo = std::min(ylo, y.states[k].minCoeff());
        yhi = std::max(yhi, y.states[k].maxCoeff());
    }
    auto fr = make_frame(xlo - 0.5, xhi + 0.5, ylo, yhi);
    std::ostringstream os;
    open_svg(os, fr, title);

    // Formation snapshots: just before each later segment starts, and at the end.
    std::vector<std::size_t> snapshots;
    for (std::size_t s = 1; s < x.segment_starts.size(); ++s) {
        auto it = std::lower_bound(x.times.begin(), x.times.end(), x.segment_starts[s] - 1e-12);
        snapshots.push_back(static_cast<std::size_t>(it - x.times.begin()));
    }
    snapshots.push_back(x.samples() - 1);
    for (auto k : snapshots) {
        // outline drawn in angular order around the centroid
        const double cx = x.states[k].mean(), cy = y.states[k].mean();
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return std::atan2(y.states[k](a) - cy, x.states[k](a) - cx) < std::atan2(y.states[k](b) - cy, x.states[k](b) - cx);
        });
        os << "<polygon fill=\"none\" stroke=\"#444\" stroke-dasharray=\"4 3\" points=\"";
        for (auto i : order) {
            os << num(fr.px(x.states[k](i)), "%.2f") << ',' << num(fr.py(y.states[k](i)), "%.2f") << ' ';
        }
        os << "\"/>\n";
    }

    const auto stride = stride_for(x.samples());
    for (Eigen::Index i = 0; i < n; ++i) {
        const char* colour = kPalette[static_cast<std::size_t>(i) % kPalette.size()];
        os << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << colour << "\" points=\"";
        for (std::size_t k = 0; k < x.samples(); k += stride) {
            os << num(fr.px(x.states[k](i)), "%.2f") << ',' << num(fr.py(y.states[k](i)), "%.2f") << ' ';
        }
        os << "\"/>\n";
        for (auto k : snapshots) {
            os << "<circle r=\"4\" fill=\"" << colour << "\" cx=\"" << num(fr.px(x.states[k](i)), "%.2f") << "\" cy=\""
               << num(fr.py(y.states[k](i)), "%.2f") << "\"/>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace leadform
