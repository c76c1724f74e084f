#include "mobmine/segmentation.hpp"

#include <stdexcept>

namespace mobmine {

TrajectoryFeatures derive_features(const std::vector<Point>& pts) {
    if (pts.size() < 2)
        throw std::invalid_argument("derive_features: a trajectory needs at least 2 points");
    TrajectoryFeatures f;
    for (std::size_t i = 1; i < pts.size(); ++i)
        f.length_m += haversine_distance(pts[i - 1], pts[i]);
    f.duration_s = static_cast<double>(pts.back().t - pts.front().t);
    f.start_hour = hour_of_day(pts.front().t);
    f.day_of_week = day_of_week(pts.front().t);
    f.mean_velocity = f.length_m / f.duration_s;
    f.start_point = pts.front();
    f.end_point = pts.back();
    return f;
}

std::vector<Trajectory> segment_trajectories(const std::vector<Point>& pts,
                                             const SegmentationParams& params) {
    std::vector<Trajectory> out;
    if (pts.empty()) return out;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].t <= pts[i - 1].t)
            throw std::invalid_argument("segment_trajectories: points not strictly time-sorted");

    std::vector<Point> cur{pts[0]};
    std::vector<double> cum{0.0};  // cumulative path distance along cur
    std::size_t w = 0;             // first index of cur inside the trailing window

    auto close = [&](std::vector<Point>&& seg) {
        if (seg.size() >= 2) {
            Trajectory t;
            t.points = std::move(seg);
            t.features = derive_features(t.points);
            out.push_back(std::move(t));
        }
    };

    for (std::size_t i = 1; i < pts.size(); ++i) {
        const Point& p = pts[i];
        const double dt = static_cast<double>(p.t - cur.back().t);
        if (dt > params.gap_threshold_s) {
            close(std::move(cur));
            cur = {p};
            cum = {0.0};
            w = 0;
            continue;
        }
        const double hop = haversine_distance(cur.back(), p);
        cur.push_back(p);
        cum.push_back(cum.back() + hop);
        while (static_cast<double>(cur[w].t) < static_cast<double>(p.t) - params.stop_window_s) ++w;
        double speed;
        if (w == cur.size() - 1) {
            speed = hop / dt;  // previous fix is older than the window (sparse data)
        } else {
            const double span = static_cast<double>(p.t - cur[w].t);
            speed = (cum.back() - cum[w]) / span;
        }
        if (speed < params.stop_speed_mps) {
            cur.pop_back();
            cum.pop_back();
            close(std::move(cur));
            cur = {p};
            cum = {0.0};
            w = 0;
        }
    }
    close(std::move(cur));
    return out;
}

}  // namespace mobmine
