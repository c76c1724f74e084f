#include "mobmine/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mobmine {

namespace {

constexpr int kNotVisited = -2;

void require_finite(const std::vector<LatLon>& pts, const char* who) {
    for (const auto& p : pts)
        if (!std::isfinite(p.lat) || !std::isfinite(p.lon))
            throw std::invalid_argument(std::string(who) + ": non-finite coordinate");
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

LatLon mean_of(const std::vector<LatLon>& pts, const std::vector<std::size_t>& idxs) {
    double la = 0.0, lo = 0.0;
    for (std::size_t i : idxs) {
        la += pts[i].lat;
        lo += pts[i].lon;
    }
    const double n = static_cast<double>(idxs.size());
    return {la / n, lo / n};
}

}  // namespace

const char* to_string(PlaceTag tag) {
    switch (tag) {
        case PlaceTag::HOME: return "HOME";
        case PlaceTag::WORK: return "WORK";
        default: return "OTHER";
    }
}

std::vector<int> predict(const std::vector<LatLon>& pts, const std::vector<LatLon>& centroids,
                         double eps_m) {
    std::vector<int> labels(pts.size(), kNoise);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double best = 0.0;
        int lab = kNoise;
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            const double d = haversine_distance(pts[i], centroids[c]);
            if (d < eps_m && (lab == kNoise || d < best - 1e-9)) {
                lab = static_cast<int>(c);
                best = d;
            }
        }
        labels[i] = lab;
    }
    return labels;
}

PlaceClustering dbmeans(const std::vector<LatLon>& pts, const ClusterParams& params) {
    require_finite(pts, "dbmeans");
    const std::size_t n = pts.size();
    if (n == 0) return {};

    std::vector<int> labels(n, kNotVisited);
    std::map<int, LatLon> centroids;  // creation id -> centroid
    int next_id = 0;

    for (std::size_t a : shuffled_order(n, params.rng_seed)) {
        if (labels[a] != kNotVisited) continue;
        labels[a] = kNoise;
        LatLon c = pts[a];
        std::vector<std::size_t> members, prev;
        for (int iter = 0;; ++iter) {
            if (iter == 1000) {
                std::fprintf(stderr,
                             "dbmeans: mean-shift window did not stabilize after 1000 "
                             "iterations; keeping the current window\n");
                break;
            }
            members.clear();
            for (std::size_t i = 0; i < n; ++i)
                if (haversine_distance(c, pts[i]) < params.eps_m) members.push_back(i);
            if (members.empty()) break;
            std::map<int, int> absorbed;  // existing cluster id -> count inside the window
            for (std::size_t i : members)
                if (labels[i] >= 0) ++absorbed[labels[i]];
            c = mean_of(pts, members);
            for (const auto& [cid, cnt] : absorbed) {
                if (cnt >= params.min_pts) {
                    for (std::size_t j = 0; j < n; ++j)
                        if (labels[j] == cid) labels[j] = kNoise;
                    centroids.erase(cid);
                }
            }
            if (members == prev) break;
            prev = members;
        }
        if (prev.size() >= static_cast<std::size_t>(params.min_pts)) {
            const int cid = next_id++;
            for (std::size_t i : prev) labels[i] = cid;
            centroids[cid] = c;
        } else {
            for (std::size_t i : prev) labels[i] = kNoise;
        }
    }

    // Final assignment, enforcing min_pts on what predict actually produces.
    for (;;) {
        std::vector<int> live;
        std::vector<LatLon> cs;
        for (const auto& [cid, c] : centroids) {
            live.push_back(cid);
            cs.push_back(c);
        }
        std::vector<int> out_labels = predict(pts, cs, params.eps_m);
        std::vector<int> counts(cs.size(), 0);
        for (int l : out_labels)
            if (l >= 0) ++counts[l];
        bool any_dissolved = false;
        for (std::size_t c = 0; c < cs.size(); ++c) {
            if (counts[c] < params.min_pts) {
                centroids.erase(live[c]);
                any_dissolved = true;
            }
        }
        if (!any_dissolved)
            return {std::move(out_labels), std::move(cs), std::move(counts)};
    }
}

std::vector<int> dbscan_baseline(const std::vector<LatLon>& pts, const ClusterParams& params) {
    require_finite(pts, "dbscan_baseline");
    const std::size_t n = pts.size();
    std::vector<int> labels(n, kNotVisited);
    auto region_query = [&](std::size_t i) {
        std::vector<std::size_t> nb;
        for (std::size_t j = 0; j < n; ++j)
            if (haversine_distance(pts[i], pts[j]) < params.eps_m) nb.push_back(j);
        return nb;
    };
    int cid = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != kNotVisited) continue;
        auto nb = region_query(i);
        if (nb.size() < static_cast<std::size_t>(params.min_pts)) {
            labels[i] = kNoise;
            continue;
        }
        labels[i] = cid;
        std::vector<std::size_t> queue = std::move(nb);
        while (!queue.empty()) {
            const std::size_t j = queue.back();
            queue.pop_back();
            if (labels[j] == kNoise) labels[j] = cid;  // border point
            if (labels[j] != kNotVisited) continue;
            labels[j] = cid;
            auto nj = region_query(j);
            if (nj.size() >= static_cast<std::size_t>(params.min_pts))
                queue.insert(queue.end(), nj.begin(), nj.end());
        }
        ++cid;
    }
    return labels;
}

PlaceClustering location_clustering_baseline(const std::vector<LatLon>& pts,
                                             const ClusterParams& params) {
    require_finite(pts, "location_clustering_baseline");
    const std::size_t n = pts.size();
    PlaceClustering out;
    out.labels.assign(n, kNoise);
    std::vector<char> claimed(n, 0);
    for (std::size_t a : shuffled_order(n, params.rng_seed)) {
        if (claimed[a]) continue;
        LatLon c = pts[a];
        std::vector<std::size_t> members, prev;
        for (int iter = 0; iter < 1000; ++iter) {
            members.clear();
            for (std::size_t i = 0; i < n; ++i)
                if (!claimed[i] && haversine_distance(c, pts[i]) < params.eps_m)
                    members.push_back(i);
            if (members.empty()) break;
            c = mean_of(pts, members);
            if (members == prev) break;
            prev = members;
        }
        if (prev.size() >= static_cast<std::size_t>(params.min_pts)) {
            const int cid = static_cast<int>(out.centroids.size());
            for (std::size_t i : prev) {
                out.labels[i] = cid;
                claimed[i] = 1;
            }
            out.centroids.push_back(c);
            out.visit_counts.push_back(static_cast<int>(prev.size()));
        }
    }
    return out;
}

std::vector<MeaningfulPlace> rank_places(const PlaceClustering& clustering) {
    std::vector<int> ids(clustering.centroids.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        if (clustering.visit_counts[a] != clustering.visit_counts[b])
            return clustering.visit_counts[a] > clustering.visit_counts[b];
        return a < b;
    });
    std::vector<MeaningfulPlace> out;
    out.reserve(ids.size());
    for (std::size_t r = 0; r < ids.size(); ++r) {
        MeaningfulPlace p;
        p.place_id = ids[r];
        p.centroid = clustering.centroids[ids[r]];
        p.visit_count = clustering.visit_counts[ids[r]];
        p.rank = static_cast<int>(r) + 1;
        p.tag = r == 0 ? PlaceTag::HOME : r == 1 ? PlaceTag::WORK : PlaceTag::OTHER;
        out.push_back(p);
    }
    return out;
}

}  // namespace mobmine
