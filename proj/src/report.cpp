#include "mobmine/report.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mobmine {

HistogramBundle emit_histograms(const std::vector<Trip>& trips, double length_bin_width_m) {
    if (trips.empty())
        throw std::invalid_argument("emit_histograms: empty trip list");
    if (length_bin_width_m <= 0.0)
        throw std::invalid_argument("emit_histograms: bin width must be positive");
    HistogramBundle b;
    b.length_bin_width_m = length_bin_width_m;
    for (const auto& t : trips) {
        const int h = std::clamp(static_cast<int>(std::floor(t.start_hour)), 0, 23);
        const int d = std::clamp(t.day_of_week, 0, 6);
        ++b.hour[h];
        ++b.dow[d];
        ++b.hour_dow[d * 24 + h];
        const auto bin = static_cast<std::size_t>(std::floor(t.length_m / length_bin_width_m));
        if (bin >= b.length_bins.size()) b.length_bins.resize(bin + 1, 0);
        ++b.length_bins[bin];
    }
    return b;
}

namespace {

MethodSummary summarize(const std::string& name, const std::vector<LatLon>& pts,
                        const std::vector<int>& labels, const std::vector<LatLon>* centroids) {
    MethodSummary s;
    s.method = name;
    int k = 0;
    for (int l : labels) {
        if (l == kNoise) ++s.noise_count;
        else k = std::max(k, l + 1);
    }
    s.cluster_count = centroids ? static_cast<int>(centroids->size()) : k;
    std::vector<LatLon> centers;
    if (centroids) {
        centers = *centroids;
    } else {
        // no centroids from this method: use member means
        centers.assign(k, {});
        std::vector<int> counts(k, 0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (labels[i] < 0) continue;
            centers[labels[i]].lat += pts[i].lat;
            centers[labels[i]].lon += pts[i].lon;
            ++counts[labels[i]];
        }
        for (int c = 0; c < k; ++c) {
            centers[c].lat /= counts[c];
            centers[c].lon /= counts[c];
        }
    }
    s.mean_radius_m.assign(centers.size(), 0.0);
    s.max_radius_m.assign(centers.size(), 0.0);
    std::vector<int> counts(centers.size(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const int l = labels[i];
        if (l < 0) continue;
        const double d = haversine_distance(pts[i], centers[l]);
        s.mean_radius_m[l] += d;
        s.max_radius_m[l] = std::max(s.max_radius_m[l], d);
        ++counts[l];
    }
    for (std::size_t c = 0; c < centers.size(); ++c)
        if (counts[c] > 0) s.mean_radius_m[c] /= counts[c];
    return s;
}

}  // namespace

ClustererComparison compare_clusterers(const std::vector<LatLon>& pts,
                                       const ClusterParams& params) {
    ClustererComparison cmp;
    const PlaceClustering dbm = dbmeans(pts, params);
    cmp.dbmeans = summarize("dbmeans", pts, dbm.labels, &dbm.centroids);
    const std::vector<int> dbs = dbscan_baseline(pts, params);
    cmp.dbscan = summarize("dbscan", pts, dbs, nullptr);
    const PlaceClustering lc = location_clustering_baseline(pts, params);
    cmp.location_clustering = summarize("location_clustering", pts, lc.labels, &lc.centroids);
    return cmp;
}

}  // namespace mobmine
