#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mobmine {

// Seconds since the Unix epoch. Timestamps are timezone-naive: whatever local
// wall time the source file carried is parsed and re-formatted unchanged.
using Timestamp = std::int64_t;

inline constexpr double kEarthRadiusM = 6371000.0;

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

struct Point {
    double lat = 0.0;
    double lon = 0.0;
    Timestamp t = 0;
    std::string user_id;
};

struct CyclicHour {
    double sin_h = 0.0;
    double cos_h = 1.0;
};

struct TrajectoryFeatures {
    double length_m = 0.0;
    double duration_s = 0.0;
    double start_hour = 0.0;  // real hours in [0, 24)
    int day_of_week = 0;      // Monday = 0 .. Sunday = 6
    double mean_velocity = 0.0;
    Point start_point;
    Point end_point;
};

struct Trajectory {
    std::vector<Point> points;  // >= 2, strictly increasing timestamps
    TrajectoryFeatures features;
};

double haversine_m(double lat1, double lon1, double lat2, double lon2);
double haversine_distance(const Point& a, const Point& b);
double haversine_distance(const LatLon& a, const LatLon& b);

// hour in [0, 24) -> point on the unit circle; throws std::invalid_argument outside
CyclicHour encode_hour_cyclic(double hour);

// arithmetic mean of degrees (clusters span < 1 km; antimeridian unsupported);
// throws std::invalid_argument on empty input
LatLon centroid(const std::vector<LatLon>& pts);

// "YYYY-MM-DD HH:MM:SS"
bool try_parse_timestamp(const std::string& s, Timestamp& out);
Timestamp parse_timestamp(const std::string& s);  // throws std::invalid_argument
std::string format_timestamp(Timestamp t);

int day_of_week(Timestamp t);     // Monday = 0
double hour_of_day(Timestamp t);  // [0, 24)

}  // namespace mobmine
