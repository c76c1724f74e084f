#pragma once

#include <vector>

#include "mobmine/core.hpp"

namespace mobmine {

struct StayPoint {
    double centroid_lat = 0.0;
    double centroid_lon = 0.0;
    Timestamp arrival = 0;
    Timestamp departure = 0;
    int point_count = 0;
    std::string user_id;
};

struct StayPointParams {
    double distance_threshold_m = 200.0;
    double time_threshold_s = 1200.0;
};

// Anchor scan over one user's time-sorted points: from anchor i, extend j while
// every point stays strictly within distance_threshold of point i; if the span
// covers at least time_threshold, emit a stay point (centroid = coordinate mean
// of points i..j) and resume at j+1, else advance the anchor by one.
std::vector<StayPoint> detect_stay_points(const std::vector<Point>& pts,
                                          const StayPointParams& params = {});

}  // namespace mobmine
