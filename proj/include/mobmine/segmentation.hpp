#pragma once

#include <vector>

#include "mobmine/core.hpp"

namespace mobmine {

struct SegmentationParams {
    double gap_threshold_s = 1800.0;  // rule (a): time gap starts a new trajectory
    double stop_speed_mps = 0.5;      // rule (b): trailing-window mean speed below this
    double stop_window_s = 300.0;     //           over this window means "stopped"
};

// Splits one user's cleaned, strictly time-sorted points into trajectories.
// A boundary is inserted on a time gap > gap_threshold, or when the mean speed
// over the trailing stop_window drops below stop_speed (the triggering point
// starts the next segment). Segments with < 2 points are discarded.
std::vector<Trajectory> segment_trajectories(const std::vector<Point>& pts,
                                             const SegmentationParams& params = {});

TrajectoryFeatures derive_features(const std::vector<Point>& pts);
inline TrajectoryFeatures derive_features(const Trajectory& t) { return derive_features(t.points); }

}  // namespace mobmine
