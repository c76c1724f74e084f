#pragma once

#include <array>
#include <string>
#include <vector>

#include "mobmine/clustering.hpp"
#include "mobmine/habits.hpp"

namespace mobmine {

struct HistogramBundle {
    std::array<int, 24> hour{};       // bin = floor(start_hour)
    std::array<int, 7> dow{};         // Monday = 0
    std::array<int, 168> hour_dow{};  // dow * 24 + hour
    std::vector<int> length_bins;     // bin i covers [i*width, (i+1)*width)
    double length_bin_width_m = 250.0;
};

// Throws std::invalid_argument on an empty trip list.
HistogramBundle emit_histograms(const std::vector<Trip>& trips,
                                double length_bin_width_m = 250.0);

struct MethodSummary {
    std::string method;
    int cluster_count = 0;
    int noise_count = 0;
    std::vector<double> mean_radius_m;  // per cluster, member distance to centroid
    std::vector<double> max_radius_m;
};

struct ClustererComparison {
    MethodSummary dbmeans;
    MethodSummary dbscan;
    MethodSummary location_clustering;
};

// Runs all three clusterers on identical input with identical params.
ClustererComparison compare_clusterers(const std::vector<LatLon>& pts,
                                       const ClusterParams& params);

}  // namespace mobmine
