#pragma once

#include <cstdint>
#include <vector>

#include "mobmine/core.hpp"

namespace mobmine {

inline constexpr int kNoise = -1;

struct ClusterParams {
    double eps_m = 200.0;
    int min_pts = 5;
    std::uint64_t rng_seed = 0;
};

struct PlaceClustering {
    std::vector<int> labels;        // per input point: cluster id or kNoise
    std::vector<LatLon> centroids;  // per cluster id
    std::vector<int> visit_counts;  // per cluster id, == label occurrences
};

enum class PlaceTag { HOME, WORK, OTHER };
const char* to_string(PlaceTag tag);

struct MeaningfulPlace {
    int place_id = 0;
    LatLon centroid;
    int visit_count = 0;
    int rank = 0;  // 1-based by descending visit_count
    PlaceTag tag = PlaceTag::OTHER;
};

// Nearest-centroid assignment: a point gets the label of its closest centroid
// if that distance is strictly below eps, else kNoise; ties within 1e-9 m go to
// the lowest cluster id.
std::vector<int> predict(const std::vector<LatLon>& pts, const std::vector<LatLon>& centroids,
                         double eps_m);

// Mean-shift windows over a seeded-shuffle anchor order: each window recenters
// on its member mean until the member set stabilizes, dissolving any existing
// cluster it absorbs min_pts members of; a stabilized window of >= min_pts
// points becomes a cluster. Final labels come from predict(), and clusters that
// predict leaves under min_pts members are dissolved (and labels recomputed)
// until none remain.
PlaceClustering dbmeans(const std::vector<LatLon>& pts, const ClusterParams& params);

// Textbook density clustering (labels only, no centroids).
std::vector<int> dbscan_baseline(const std::vector<LatLon>& pts, const ClusterParams& params);

// Mean-shift over the still-unclaimed points only; a converged window of
// >= min_pts members is claimed permanently and removed from the pool, which is
// what produces satellite clusters next to already-claimed dense regions.
PlaceClustering location_clustering_baseline(const std::vector<LatLon>& pts,
                                             const ClusterParams& params);

// Descending visit_count (ties to the lower cluster id); rank 1 -> HOME,
// rank 2 -> WORK, the rest OTHER.
std::vector<MeaningfulPlace> rank_places(const PlaceClustering& clustering);

}  // namespace mobmine
