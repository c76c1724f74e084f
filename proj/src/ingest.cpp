#include "mobmine/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <stdexcept>
#include <tuple>

namespace mobmine {

namespace {

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && *b == ' ') ++b;
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc{} && p == e && std::isfinite(out);
}

bool valid_lat(double v) { return v >= -90.0 && v <= 90.0; }
bool valid_lon(double v) { return v >= -180.0 && v <= 180.0; }

}  // namespace

ParseResult parse_geolife_plt(std::istream& in, const std::string& user_id) {
    std::string line;
    for (int i = 0; i < 6; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("plt: truncated header (expected 6 lines, got " +
                                     std::to_string(i) + ")");
    }
    ParseResult res;
    while (std::getline(in, line)) {
        strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        double lat, lon;
        Timestamp t;
        if (fields.size() < 7 || !parse_double(fields[0], lat) || !parse_double(fields[1], lon) ||
            !valid_lat(lat) || !valid_lon(lon) ||
            !try_parse_timestamp(fields[5] + " " + fields[6], t)) {
            ++res.rejected_lines;
            continue;
        }
        res.points.push_back({lat, lon, t, user_id});
    }
    return res;
}

ParseResult parse_gsm_csv(std::istream& in, const GsmCsvLayout& layout) {
    const int need = std::max({layout.user_col, layout.lat_col, layout.lon_col, layout.time_col}) + 1;
    ParseResult res;
    std::string line;
    bool first = true;
    bool saw_data_row = false;
    while (std::getline(in, line)) {
        strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split(line, layout.delimiter);
        if (first) {
            first = false;
            double probe;
            const bool looks_like_header =
                static_cast<int>(fields.size()) <= layout.lat_col ||
                !parse_double(fields[layout.lat_col], probe);
            if (looks_like_header) continue;
        }
        if (static_cast<int>(fields.size()) < need) {
            if (!saw_data_row) {
                const char* role = "user_id";
                int idx = layout.user_col;
                for (auto [r, c] : {std::pair{"timestamp", layout.time_col},
                                    std::pair{"longitude", layout.lon_col},
                                    std::pair{"latitude", layout.lat_col},
                                    std::pair{"user_id", layout.user_col}})
                    if (c >= static_cast<int>(fields.size())) { role = r; idx = c; }
                throw std::runtime_error("gsm csv: missing column '" + std::string(role) +
                                         "' (index " + std::to_string(idx) + ")");
            }
            ++res.rejected_lines;
            continue;
        }
        saw_data_row = true;
        double lat, lon;
        Timestamp t;
        if (!parse_double(fields[layout.lat_col], lat) || !parse_double(fields[layout.lon_col], lon) ||
            !valid_lat(lat) || !valid_lon(lon) ||
            !try_parse_timestamp(fields[layout.time_col], t) || fields[layout.user_col].empty()) {
            ++res.rejected_lines;
            continue;
        }
        res.points.push_back({lat, lon, t, fields[layout.user_col]});
    }
    return res;
}

std::pair<std::vector<Point>, CleaningReport> clean(std::vector<Point> pts, double max_speed_mps) {
    CleaningReport rep;
    rep.input_count = static_cast<std::int64_t>(pts.size());
    std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return std::tie(a.user_id, a.t, a.lat, a.lon) < std::tie(b.user_id, b.t, b.lat, b.lon);
    });
    std::vector<Point> out;
    out.reserve(pts.size());
    const Point* last_kept = nullptr;  // last kept point of the current user
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point& p = pts[i];
        if (i > 0) {
            const Point& prev = pts[i - 1];
            if (prev.user_id == p.user_id && prev.t == p.t && prev.lat == p.lat && prev.lon == p.lon) {
                ++rep.duplicate_count;
                continue;
            }
        }
        if (last_kept && last_kept->user_id != p.user_id) last_kept = nullptr;
        if (last_kept) {
            const double dt = static_cast<double>(p.t - last_kept->t);
            const double d = haversine_distance(*last_kept, p);
            if (dt <= 0.0 || d / dt > max_speed_mps) {
                ++rep.outlier_count;
                continue;
            }
        }
        out.push_back(p);
        last_kept = &out.back();
    }
    rep.output_count = static_cast<std::int64_t>(out.size());
    return {std::move(out), rep};
}

}  // namespace mobmine
