#include "mobmine/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace mobmine {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double to_double(const std::string& s) {
    double v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw std::runtime_error("csv: bad number '" + s + "'");
    return v;
}

int to_int(const std::string& s) {
    int v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw std::runtime_error("csv: bad integer '" + s + "'");
    return v;
}

bool next_row(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) return true;
    }
    return false;
}

void expect_fields(const std::vector<std::string>& f, std::size_t n, const char* what) {
    if (f.size() != n)
        throw std::runtime_error(std::string("csv: ") + what + ": expected " +
                                 std::to_string(n) + " fields, got " + std::to_string(f.size()));
}

}  // namespace

std::string fmt_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

void write_points_csv(std::ostream& out, const std::vector<Point>& pts) {
    out << "user_id,lat,lon,timestamp\n";
    for (const auto& p : pts)
        out << p.user_id << ',' << fmt_double(p.lat) << ',' << fmt_double(p.lon) << ','
            << format_timestamp(p.t) << '\n';
}

std::vector<Point> read_points_csv(std::istream& in) {
    std::vector<Point> pts;
    std::string line;
    bool first = true;
    while (next_row(in, line)) {
        if (first) {
            first = false;
            if (line.rfind("user_id,", 0) == 0) continue;
        }
        const auto f = split_csv(line);
        expect_fields(f, 4, "points");
        pts.push_back({to_double(f[1]), to_double(f[2]), parse_timestamp(f[3]), f[0]});
    }
    return pts;
}

void write_staypoints_csv(std::ostream& out,
                          const std::map<std::string, std::vector<StayPoint>>& by_user) {
    out << "user_id,sp_id,lat,lon,arrival,departure,point_count\n";
    for (const auto& [user, sps] : by_user) {
        for (std::size_t i = 0; i < sps.size(); ++i) {
            const auto& sp = sps[i];
            out << user << ',' << i << ',' << fmt_double(sp.centroid_lat) << ','
                << fmt_double(sp.centroid_lon) << ',' << format_timestamp(sp.arrival) << ','
                << format_timestamp(sp.departure) << ',' << sp.point_count << '\n';
        }
    }
}

std::map<std::string, std::vector<StayPoint>> read_staypoints_csv(std::istream& in) {
    std::map<std::string, std::vector<StayPoint>> by_user;
    std::string line;
    bool first = true;
    while (next_row(in, line)) {
        if (first) {
            first = false;
            if (line.rfind("user_id,", 0) == 0) continue;
        }
        const auto f = split_csv(line);
        expect_fields(f, 7, "staypoints");
        StayPoint sp;
        sp.user_id = f[0];
        sp.centroid_lat = to_double(f[2]);
        sp.centroid_lon = to_double(f[3]);
        sp.arrival = parse_timestamp(f[4]);
        sp.departure = parse_timestamp(f[5]);
        sp.point_count = to_int(f[6]);
        by_user[f[0]].push_back(std::move(sp));
    }
    return by_user;
}

void write_trajectories_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
    out << "user_id,traj_id,start_time,end_time,length_m,duration_s,"
           "start_lat,start_lon,end_lat,end_lon,dow,start_hour\n";
    for (const auto& r : rows) {
        out << r.user_id << ',' << r.traj_id << ',' << format_timestamp(r.start_time) << ','
            << format_timestamp(r.end_time) << ',' << fmt_double(r.length_m) << ','
            << fmt_double(r.duration_s) << ',' << fmt_double(r.start_lat) << ','
            << fmt_double(r.start_lon) << ',' << fmt_double(r.end_lat) << ','
            << fmt_double(r.end_lon) << ',' << r.dow << ',' << fmt_double(r.start_hour) << '\n';
    }
}

std::vector<TrajectoryRow> read_trajectories_csv(std::istream& in) {
    std::vector<TrajectoryRow> rows;
    std::string line;
    bool first = true;
    while (next_row(in, line)) {
        if (first) {
            first = false;
            if (line.rfind("user_id,", 0) == 0) continue;
        }
        const auto f = split_csv(line);
        expect_fields(f, 12, "trajectories");
        TrajectoryRow r;
        r.user_id = f[0];
        r.traj_id = to_int(f[1]);
        r.start_time = parse_timestamp(f[2]);
        r.end_time = parse_timestamp(f[3]);
        r.length_m = to_double(f[4]);
        r.duration_s = to_double(f[5]);
        r.start_lat = to_double(f[6]);
        r.start_lon = to_double(f[7]);
        r.end_lat = to_double(f[8]);
        r.end_lon = to_double(f[9]);
        r.dow = to_int(f[10]);
        r.start_hour = to_double(f[11]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_clustering_csv(std::ostream& out, const std::vector<ClusteringRow>& rows) {
    out << "user_id,sp_id,label,centroid_lat,centroid_lon\n";
    for (const auto& r : rows) {
        out << r.user_id << ',' << r.sp_id << ',' << r.label << ',';
        if (r.label >= 0)
            out << fmt_double(r.centroid_lat) << ',' << fmt_double(r.centroid_lon);
        else
            out << ',';
        out << '\n';
    }
}

std::vector<ClusteringRow> read_clustering_csv(std::istream& in) {
    std::vector<ClusteringRow> rows;
    std::string line;
    bool first = true;
    while (next_row(in, line)) {
        if (first) {
            first = false;
            if (line.rfind("user_id,", 0) == 0) continue;
        }
        const auto f = split_csv(line);
        expect_fields(f, 5, "clustering");
        ClusteringRow r;
        r.user_id = f[0];
        r.sp_id = to_int(f[1]);
        r.label = to_int(f[2]);
        if (r.label < 0) continue;
        r.centroid_lat = to_double(f[3]);
        r.centroid_lon = to_double(f[4]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace mobmine
