#include "mobmine/staypoints.hpp"

namespace mobmine {

std::vector<StayPoint> detect_stay_points(const std::vector<Point>& pts,
                                          const StayPointParams& params) {
    std::vector<StayPoint> out;
    const std::size_t n = pts.size();
    if (n < 2) return out;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n &&
               haversine_distance(pts[i], pts[j + 1]) < params.distance_threshold_m)
            ++j;
        if (static_cast<double>(pts[j].t - pts[i].t) >= params.time_threshold_s) {
            StayPoint sp;
            double la = 0.0, lo = 0.0;
            for (std::size_t k = i; k <= j; ++k) {
                la += pts[k].lat;
                lo += pts[k].lon;
            }
            const double m = static_cast<double>(j - i + 1);
            sp.centroid_lat = la / m;
            sp.centroid_lon = lo / m;
            sp.arrival = pts[i].t;
            sp.departure = pts[j].t;
            sp.point_count = static_cast<int>(j - i + 1);
            sp.user_id = pts[i].user_id;
            out.push_back(std::move(sp));
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

}  // namespace mobmine
