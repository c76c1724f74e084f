#include "mobmine/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace mobmine {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Howard Hinnant's civil-date algorithms.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y = yr + (m <= 2);
}

bool is_leap(std::int64_t y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[m - 1];
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

bool parse_fixed_uint(const char* s, int width, long& out) {
    long v = 0;
    for (int i = 0; i < width; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

}  // namespace

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlam = (lon2 - lon1) * kDegToRad;
    const double sp = std::sin(dphi / 2.0);
    const double sl = std::sin(dlam / 2.0);
    double a = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
    a = std::clamp(a, 0.0, 1.0);
    return 2.0 * kEarthRadiusM * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
}

double haversine_distance(const Point& a, const Point& b) {
    return haversine_m(a.lat, a.lon, b.lat, b.lon);
}

double haversine_distance(const LatLon& a, const LatLon& b) {
    return haversine_m(a.lat, a.lon, b.lat, b.lon);
}

CyclicHour encode_hour_cyclic(double hour) {
    if (!(hour >= 0.0 && hour < 24.0))
        throw std::invalid_argument("encode_hour_cyclic: hour outside [0, 24)");
    const double theta = 2.0 * std::numbers::pi * hour / 24.0;
    return {std::sin(theta), std::cos(theta)};
}

LatLon centroid(const std::vector<LatLon>& pts) {
    if (pts.empty()) throw std::invalid_argument("centroid: empty point set");
    double la = 0.0, lo = 0.0;
    for (const auto& p : pts) {
        la += p.lat;
        lo += p.lon;
    }
    const double n = static_cast<double>(pts.size());
    return {la / n, lo / n};
}

bool try_parse_timestamp(const std::string& s, Timestamp& out) {
    // strict "YYYY-MM-DD HH:MM:SS"
    if (s.size() != 19 || s[4] != '-' || s[7] != '-' || s[10] != ' ' || s[13] != ':' || s[16] != ':')
        return false;
    long y, mo, d, h, mi, se;
    if (!parse_fixed_uint(s.data(), 4, y) || !parse_fixed_uint(s.data() + 5, 2, mo) ||
        !parse_fixed_uint(s.data() + 8, 2, d) || !parse_fixed_uint(s.data() + 11, 2, h) ||
        !parse_fixed_uint(s.data() + 14, 2, mi) || !parse_fixed_uint(s.data() + 17, 2, se))
        return false;
    if (mo < 1 || mo > 12 || d < 1 || h > 23 || mi > 59 || se > 59) return false;
    if (static_cast<unsigned>(d) > days_in_month(y, static_cast<unsigned>(mo))) return false;
    out = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 +
          h * 3600 + mi * 60 + se;
    return true;
}

Timestamp parse_timestamp(const std::string& s) {
    Timestamp t;
    if (!try_parse_timestamp(s, t))
        throw std::invalid_argument("parse_timestamp: expected \"YYYY-MM-DD HH:MM:SS\", got \"" + s + "\"");
    return t;
}

std::string format_timestamp(Timestamp t) {
    const std::int64_t days = floor_div(t, 86400);
    std::int64_t rem = t - days * 86400;
    std::int64_t y;
    unsigned mo, d;
    civil_from_days(days, y, mo, d);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u %02lld:%02lld:%02lld",
                  static_cast<long long>(y), mo, d,
                  static_cast<long long>(rem / 3600),
                  static_cast<long long>(rem / 60 % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

int day_of_week(Timestamp t) {
    const std::int64_t days = floor_div(t, 86400);
    return static_cast<int>(((days % 7) + 7 + 3) % 7);  // 1970-01-01 was a Thursday
}

double hour_of_day(Timestamp t) {
    const std::int64_t days = floor_div(t, 86400);
    return static_cast<double>(t - days * 86400) / 3600.0;
}

}  // namespace mobmine
