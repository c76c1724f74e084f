#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mobmine/core.hpp"

namespace mobmine {

struct CleaningReport {
    std::int64_t input_count = 0;
    std::int64_t duplicate_count = 0;
    std::int64_t outlier_count = 0;
    std::int64_t output_count = 0;
};

struct ParseResult {
    std::vector<Point> points;
    std::int64_t rejected_lines = 0;
};

// Geolife PLT: 6 header lines to skip, then lines of
//   lat,lon,0,altitude_feet,days_since_1899,date,time
// Malformed data lines are rejected and counted; a stream with fewer than
// 6 header lines throws std::runtime_error.
ParseResult parse_geolife_plt(std::istream& in, const std::string& user_id);

struct GsmCsvLayout {
    char delimiter = ',';
    int user_col = 0;
    int lat_col = 1;
    int lon_col = 2;
    int time_col = 3;
};

// Delimiter-separated rows carrying user id, latitude, longitude, timestamp.
// A header row is auto-detected (lat column not parseable as a number). A first
// data row missing a configured column throws std::runtime_error naming the
// column; later short or unparseable rows are rejected and counted.
ParseResult parse_gsm_csv(std::istream& in, const GsmCsvLayout& layout = {});

// Stable-sorts by (user, time, lat, lon), drops exact duplicates, then drops
// points whose implied speed from the previous kept point of the same user
// exceeds max_speed (a repeated timestamp with different coordinates counts as
// infinite speed). Idempotent; the report satisfies
// output = input - duplicates - outliers.
std::pair<std::vector<Point>, CleaningReport> clean(std::vector<Point> pts,
                                                    double max_speed_mps = 50.0);

}  // namespace mobmine
