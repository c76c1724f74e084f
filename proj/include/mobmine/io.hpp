#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mobmine/core.hpp"
#include "mobmine/staypoints.hpp"

namespace mobmine {

// shortest round-trip decimal form (std::to_chars)
std::string fmt_double(double v);

// points.csv: user_id,lat,lon,timestamp
void write_points_csv(std::ostream& out, const std::vector<Point>& pts);
std::vector<Point> read_points_csv(std::istream& in);

// staypoints.csv: user_id,sp_id,lat,lon,arrival,departure,point_count
void write_staypoints_csv(std::ostream& out, const std::map<std::string, std::vector<StayPoint>>& by_user);
std::map<std::string, std::vector<StayPoint>> read_staypoints_csv(std::istream& in);

// trajectories.csv: user_id,traj_id,start_time,end_time,length_m,duration_s,
//                   start_lat,start_lon,end_lat,end_lon,dow,start_hour
struct TrajectoryRow {
    std::string user_id;
    int traj_id = 0;
    Timestamp start_time = 0;
    Timestamp end_time = 0;
    double length_m = 0.0;
    double duration_s = 0.0;
    double start_lat = 0.0, start_lon = 0.0;
    double end_lat = 0.0, end_lon = 0.0;
    int dow = 0;
    double start_hour = 0.0;
};
void write_trajectories_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows);
std::vector<TrajectoryRow> read_trajectories_csv(std::istream& in);

// clustering.csv: user_id,sp_id,label,centroid_lat,centroid_lon
// (noise rows carry label -1 and empty centroid columns)
struct ClusteringRow {
    std::string user_id;
    int sp_id = 0;
    int label = 0;
    double centroid_lat = 0.0;
    double centroid_lon = 0.0;
};
void write_clustering_csv(std::ostream& out, const std::vector<ClusteringRow>& rows);
std::vector<ClusteringRow> read_clustering_csv(std::istream& in);  // skips noise rows

}  // namespace mobmine
