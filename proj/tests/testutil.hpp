#pragma once
// Shared fixture generators for the test binaries. Everything is seeded and
// header-only; keep the geometry in local metric xy and convert at the edge.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "mobmine/core.hpp"

namespace testutil {

inline constexpr double kBaseLat = 40.0;
inline constexpr double kBaseLon = 116.32;
inline const double kPi = std::acos(-1.0);

inline mobmine::LatLon xy_to_latlon(double x_m, double y_m) {
    const double lat = kBaseLat + (y_m / mobmine::kEarthRadiusM) * 180.0 / kPi;
    const double lon = kBaseLon + x_m / (mobmine::kEarthRadiusM *
                                         std::cos(kBaseLat * kPi / 180.0)) *
                                      180.0 / kPi;
    return {lat, lon};
}

inline double urand(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// n points uniform over a disc of the given radius centered at (cx, cy) meters.
inline void emit_disc(std::mt19937_64& rng, double cx, double cy, double radius_m, int n,
                      std::vector<mobmine::LatLon>& out) {
    for (int i = 0; i < n; ++i) {
        const double r = radius_m * std::sqrt(urand(rng, 0.0, 1.0));
        const double th = urand(rng, 0.0, 2.0 * kPi);
        out.push_back(xy_to_latlon(cx + r * std::cos(th), cy + r * std::sin(th)));
    }
}

// Two dense blobs joined by a density ramp that thins toward the middle.
// Designed so that with eps = 200 m, min_pts = 5:
//   - every mean-shift window slides into one of the blob basins (2 clusters),
//   - the bridge keeps a DBSCAN-style core chain connected (1 cluster),
//   - claim-as-you-go clustering strands the far skirt as satellites (>= 3).
struct Fig3Fixture {
    std::vector<mobmine::LatLon> points;
    std::vector<int> tag;  // 0 = blob A, 1 = blob B, 2/3 = skirts, 4 = bridge singles
    mobmine::LatLon center_a, center_b;
};

inline Fig3Fixture bridged_blob_fixture(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0xABCDEFull);
    Fig3Fixture f;
    f.center_a = xy_to_latlon(0.0, 0.0);
    f.center_b = xy_to_latlon(1040.0, 0.0);
    for (int b = 0; b < 2; ++b) {
        const double cx = b == 0 ? 0.0 : 1040.0;
        for (int i = 0; i < 40; ++i) {
            const double r = 70.0 * std::sqrt(urand(rng, 0.0, 1.0));
            const double th = urand(rng, 0.0, 2.0 * kPi);
            f.points.push_back(xy_to_latlon(cx + r * std::cos(th), r * std::sin(th)));
            f.tag.push_back(b);
        }
    }
    for (const double x : {90.0, 128.0, 170.0, 215.0, 260.0})
        for (const double ys : {1.0, -1.0}) {
            f.points.push_back(xy_to_latlon(x + urand(rng, -5.0, 5.0),
                                            ys * 12.0 + urand(rng, -4.0, 4.0)));
            f.tag.push_back(2);
        }
    for (const double x : {690.0, 730.0, 775.0, 825.0, 880.0, 950.0})
        for (const double ys : {1.0, -1.0}) {
            f.points.push_back(xy_to_latlon(x + urand(rng, -5.0, 5.0),
                                            ys * 12.0 + urand(rng, -4.0, 4.0)));
            f.tag.push_back(3);
        }
    for (const double x : {390.0, 555.0}) {
        f.points.push_back(xy_to_latlon(x + urand(rng, -4.0, 4.0), urand(rng, -6.0, 6.0)));
        f.tag.push_back(4);
    }
    return f;
}

// k well-separated blobs with ground-truth labels: radius 45 m (< eps/4),
// nearest centers 1000 m apart with +-50 m jitter, so worst-case
// separation stays above 4 * eps = 800 m.
struct BlobFixture {
    std::vector<mobmine::LatLon> points;
    std::vector<int> truth;
    int k = 0;
};

inline BlobFixture separated_blob_fixture(std::uint64_t seed, int k) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 12345);
    BlobFixture f;
    f.k = k;
    for (int b = 0; b < k; ++b) {
        const double cx = 1000.0 * b + urand(rng, -50.0, 50.0);
        const double cy = urand(rng, -50.0, 50.0);
        const int n = 8 + static_cast<int>(urand(rng, 0.0, 33.0));
        emit_disc(rng, cx, cy, 45.0, n, f.points);
        f.truth.insert(f.truth.end(), n, b);
    }
    return f;
}

inline double choose2(double n) { return n * (n - 1.0) / 2.0; }

// Adjusted Rand index; every distinct label value (noise included) is its own class.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    const std::size_t n = a.size();
    std::vector<int> av(a), bv(b);
    std::sort(av.begin(), av.end());
    av.erase(std::unique(av.begin(), av.end()), av.end());
    std::sort(bv.begin(), bv.end());
    bv.erase(std::unique(bv.begin(), bv.end()), bv.end());
    std::vector<std::vector<double>> m(av.size(), std::vector<double>(bv.size(), 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto ia = std::lower_bound(av.begin(), av.end(), a[i]) - av.begin();
        const auto ib = std::lower_bound(bv.begin(), bv.end(), b[i]) - bv.begin();
        m[ia][ib] += 1.0;
    }
    double index = 0.0, rows = 0.0, cols = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) {
        double ri = 0.0;
        for (std::size_t j = 0; j < bv.size(); ++j) {
            index += choose2(m[i][j]);
            ri += m[i][j];
        }
        rows += choose2(ri);
    }
    for (std::size_t j = 0; j < bv.size(); ++j) {
        double cj = 0.0;
        for (std::size_t i = 0; i < av.size(); ++i) cj += m[i][j];
        cols += choose2(cj);
    }
    const double expected = rows * cols / choose2(static_cast<double>(n));
    const double max_index = (rows + cols) / 2.0;
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

// A random trace alternating dwells and moves; used for property tests.
inline std::vector<mobmine::Point> random_trace(std::uint64_t seed,
                                                const std::string& user = "u") {
    std::mt19937_64 rng(seed + 0xC0FFEEull);
    std::vector<mobmine::Point> pts;
    const int n = 50 + static_cast<int>(urand(rng, 0.0, 250.0));
    double x = urand(rng, -500.0, 500.0), y = urand(rng, -500.0, 500.0);
    mobmine::Timestamp t = 1600000000;
    int dwell_left = 0;
    double dwell_r = 0.0, dwell_x = 0.0, dwell_y = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto ll = xy_to_latlon(x, y);
        pts.push_back({ll.lat, ll.lon, t, user});
        const double dt = urand(rng, 10.0, 120.0);
        t += static_cast<mobmine::Timestamp>(dt);
        if (dwell_left > 0) {
            --dwell_left;
            const double th = urand(rng, 0.0, 2.0 * kPi);
            const double r = dwell_r * std::sqrt(urand(rng, 0.0, 1.0));
            x = dwell_x + r * std::cos(th);
            y = dwell_y + r * std::sin(th);
        } else if (urand(rng, 0.0, 1.0) < 0.25) {
            dwell_left = 5 + static_cast<int>(urand(rng, 0.0, 25.0));
            dwell_r = urand(rng, 5.0, 60.0);
            dwell_x = x;
            dwell_y = y;
        } else {
            const double speed = urand(rng, 0.5, 20.0);
            const double th = urand(rng, 0.0, 2.0 * kPi);
            x += speed * dt * std::cos(th);
            y += speed * dt * std::sin(th);
        }
    }
    return pts;
}

// Synthetic user commuting between two fixed places, 60 trips over 60 days.
// Even days go home -> work with departure-hour modes {7.5, 12.5, 18.0},
// odd days go work -> home with modes {8.5, 13.5, 21.0}; ten trips per mode.
struct PlantedUser {
    std::vector<mobmine::Point> points;
    std::vector<int> trip_mode;       // per trip, day order: planted mode 0..2
    std::vector<int> trip_direction;  // 0 = home -> work, 1 = work -> home
    mobmine::LatLon home, work;
};

inline PlantedUser planted_habit_user(std::uint64_t seed, const std::string& user = "u9") {
    std::mt19937_64 rng(seed ^ 0x5EEDull);
    std::normal_distribution<double> hour_noise(0.0, 0.25);
    PlantedUser pu;
    pu.home = xy_to_latlon(0.0, 0.0);
    pu.work = xy_to_latlon(3000.0, 0.0);
    const double out_modes[3] = {7.5, 12.5, 18.0};
    const double back_modes[3] = {8.5, 13.5, 21.0};
    const mobmine::Timestamp day0 = 1672617600;  // 2023-01-02 00:00:00, a Monday
    auto jitter_at = [&](double cx, double r) {
        const double th = urand(rng, 0.0, 2.0 * kPi);
        const double rr = r * std::sqrt(urand(rng, 0.0, 1.0));
        return xy_to_latlon(cx + rr * std::cos(th), rr * std::sin(th));
    };
    for (int d = 0; d < 60; ++d) {
        const int dir = d % 2;
        const int mode = (d / 2) % 3;
        double hour = (dir == 0 ? out_modes[mode] : back_modes[mode]) + hour_noise(rng);
        hour = std::clamp(hour, 5.0, 22.5);
        const mobmine::Timestamp t0 =
            day0 + 86400LL * d + static_cast<mobmine::Timestamp>(hour * 3600.0);
        const double ox = dir == 0 ? 0.0 : 3000.0;
        const double dx = dir == 0 ? 3000.0 : 0.0;
        for (int i = 0; i <= 25; ++i) {  // 26 fixes, 25 min dwell at the origin
            const auto ll = jitter_at(ox, 10.0);
            pu.points.push_back({ll.lat, ll.lon, t0 + 60LL * i, user});
        }
        for (int j = 1; j <= 20; ++j) {  // 10 min travel leg at ~5 m/s
            const double frac = j / 20.0;
            const auto ll = xy_to_latlon(ox + (dx - ox) * frac + urand(rng, -5.0, 5.0),
                                         urand(rng, -5.0, 5.0));
            pu.points.push_back({ll.lat, ll.lon, t0 + 1500 + 30LL * j, user});
        }
        for (int i = 1; i <= 25; ++i) {  // 25 min dwell at the destination
            const auto ll = jitter_at(dx, 10.0);
            pu.points.push_back({ll.lat, ll.lon, t0 + 2100 + 60LL * i, user});
        }
        pu.trip_mode.push_back(mode);
        pu.trip_direction.push_back(dir);
    }
    return pu;
}

}  // namespace testutil
