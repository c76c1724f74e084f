#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mobmine/io.hpp"
#include "mobmine/pipeline.hpp"
#include "testutil.hpp"

using namespace mobmine;
namespace fs = std::filesystem;

namespace {

constexpr Timestamp kDay0 = 1672617600;  // the planted user's first day, 00:00

PipelineConfig base_config() {
    PipelineConfig cfg;
    cfg.format = InputFormat::POINTS;
    cfg.clustering.rng_seed = 0;
    return cfg;
}

int day_of_trip(const UserAnalysis& ua, const Trip& t) {
    const auto& traj = ua.trajectories.at(static_cast<std::size_t>(t.trajectory_id));
    return static_cast<int>((traj.points.front().t - kDay0) / 86400);
}

// fraction of a pair's trips whose habit matches the planted mode, best relabeling
double pair_agreement(const UserAnalysis& ua, const PairReport& pr,
                      const testutil::PlantedUser& pu) {
    std::map<int, int> assigned_by_day;
    for (std::size_t j = 0; j < pr.habits.size(); ++j)
        for (int tid : pr.habits[j].trip_ids) {
            const auto& traj = ua.trajectories.at(static_cast<std::size_t>(tid));
            const int day = static_cast<int>((traj.points.front().t - kDay0) / 86400);
            assigned_by_day[day] = static_cast<int>(j);
        }
    std::vector<int> perm(pr.habits.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
        int hits = 0;
        for (const auto& [day, habit] : assigned_by_day)
            if (perm[habit] == pu.trip_mode.at(day)) ++hits;
        best = std::max(best, static_cast<double>(hits) / assigned_by_day.size());
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::size_t data_rows(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line.rfind("user_id,", 0) == 0) continue;
        ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("planted commuter: two places, both directions, three habits each") {
    const auto pu = testutil::planted_habit_user(1);
    const PipelineConfig cfg = base_config();
    const UserAnalysis ua = analyze_user("u9", pu.points, cfg);

    REQUIRE(ua.report.place_count == 2);
    const int home_id = haversine_distance(ua.clustering.centroids[0], pu.home) <
                                haversine_distance(ua.clustering.centroids[1], pu.home)
                            ? 0
                            : 1;
    const int work_id = 1 - home_id;
    CHECK(haversine_distance(ua.clustering.centroids[home_id], pu.home) < 50.0);
    CHECK(haversine_distance(ua.clustering.centroids[work_id], pu.work) < 50.0);

    REQUIRE(ua.report.pairs.size() == 2);
    for (const auto& pr : ua.report.pairs) {
        CHECK(pr.trip_count == 30);
        REQUIRE(pr.habits.size() == 3);
        int support = 0;
        for (const auto& h : pr.habits) support += h.support;
        CHECK(support == pr.trip_count);
        CHECK(pair_agreement(ua, pr, pu) >= 0.9);
    }
    const bool has_out = std::any_of(ua.report.pairs.begin(), ua.report.pairs.end(),
                                     [&](const PairReport& p) {
                                         return p.pair == ODPair{home_id, work_id};
                                     });
    const bool has_back = std::any_of(ua.report.pairs.begin(), ua.report.pairs.end(),
                                      [&](const PairReport& p) {
                                          return p.pair == ODPair{work_id, home_id};
                                      });
    CHECK(has_out);
    CHECK(has_back);

    // every trip's planted direction matches its OD pair
    for (const auto& t : ua.trips) {
        const int day = day_of_trip(ua, t);
        const int dir = pu.trip_direction.at(day);
        CHECK(t.origin_place == (dir == 0 ? home_id : work_id));
        CHECK(t.destination_place == (dir == 0 ? work_id : home_id));
    }

    const UserAnalysis again = analyze_user("u9", pu.points, cfg);
    CHECK(user_report_json(again.report) == user_report_json(ua.report));
}

TEST_CASE("run_pipeline writes dumps that reconcile with the report") {
    const auto pu = testutil::planted_habit_user(2);
    const fs::path in_dir = fresh_dir("mobmine_pipe_in");
    {
        std::ofstream out(in_dir / "points.csv");
        write_points_csv(out, pu.points);
    }
    PipelineConfig cfg = base_config();
    cfg.input_path = (in_dir / "points.csv").string();
    const fs::path out1 = fresh_dir("mobmine_pipe_out1");
    cfg.out_dir = out1.string();
    const PipelineResult res = run_pipeline(cfg);
    REQUIRE(res.reports.size() == 1);
    CHECK(res.skipped_users.empty());
    const UserReport& rep = res.reports[0];
    CHECK(rep.user_id == "u9");

    CHECK(data_rows(out1 / "points.csv") ==
          static_cast<std::size_t>(rep.cleaning.output_count));
    CHECK(data_rows(out1 / "trajectories.csv") == static_cast<std::size_t>(rep.trajectory_count));
    CHECK(data_rows(out1 / "staypoints.csv") == static_cast<std::size_t>(rep.stay_point_count));
    {
        std::ifstream in(out1 / "clustering.csv");
        const auto rows = read_clustering_csv(in);
        std::set<int> ids;
        for (const auto& r : rows) ids.insert(r.label);
        CHECK(static_cast<int>(ids.size()) == rep.place_count);
    }
    for (const auto& name : {"places.json", "habits.json", "cleaning_report.json"})
        CHECK(fs::exists(out1 / name));
    CHECK(fs::exists(out1 / "report_u9.json"));
    for (const auto& pr : rep.pairs) {
        const std::string stem = "hist_u9_" + std::to_string(pr.pair.origin) + "-" +
                                 std::to_string(pr.pair.dest);
        CHECK(fs::exists(out1 / (stem + "_hour.csv")));
        CHECK(fs::exists(out1 / (stem + "_dow.csv")));
        CHECK(fs::exists(out1 / (stem + "_hour_dow.csv")));
        CHECK(fs::exists(out1 / (stem + "_length.csv")));
        const int hour_total = std::accumulate(pr.histograms.hour.begin(),
                                               pr.histograms.hour.end(), 0);
        CHECK(hour_total == pr.trip_count);
    }

    // byte-identical outputs on a re-run with the same seed
    const fs::path out2 = fresh_dir("mobmine_pipe_out2");
    cfg.out_dir = out2.string();
    run_pipeline(cfg);
    for (const auto& name :
         {"places.json", "habits.json", "report_u9.json", "cleaning_report.json",
          "trajectories.csv", "staypoints.csv", "clustering.csv"})
        CHECK(slurp(out1 / name) == slurp(out2 / name));
}

TEST_CASE("empty input produces an empty result") {
    const fs::path dir = fresh_dir("mobmine_pipe_empty");
    {
        std::ofstream out(dir / "points.csv");
        write_points_csv(out, {});
    }
    PipelineConfig cfg = base_config();
    cfg.input_path = (dir / "points.csv").string();
    const PipelineResult res = run_pipeline(cfg);
    CHECK(res.reports.empty());
    CHECK(res.skipped_users.empty());
    CHECK(res.total_cleaning.input_count == 0);
}

TEST_CASE("user filter and parallel jobs agree with the serial run") {
    std::vector<Point> pts;
    for (std::uint64_t s = 0; s < 3; ++s) {
        const auto pu = testutil::planted_habit_user(s + 10, "user" + std::to_string(s));
        pts.insert(pts.end(), pu.points.begin(), pu.points.end());
    }
    const fs::path dir = fresh_dir("mobmine_pipe_multi");
    {
        std::ofstream out(dir / "points.csv");
        write_points_csv(out, pts);
    }
    PipelineConfig cfg = base_config();
    cfg.input_path = (dir / "points.csv").string();

    cfg.users = {"user1"};
    const PipelineResult only = run_pipeline(cfg);
    REQUIRE(only.reports.size() == 1);
    CHECK(only.reports[0].user_id == "user1");

    cfg.users.clear();
    const PipelineResult serial = run_pipeline(cfg);
    cfg.jobs = 3;
    const PipelineResult parallel = run_pipeline(cfg);
    REQUIRE(serial.reports.size() == 3);
    REQUIRE(parallel.reports.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(serial.reports[i].user_id == parallel.reports[i].user_id);
        CHECK(user_report_json(serial.reports[i]) == user_report_json(parallel.reports[i]));
    }
}

TEST_CASE("load_input groups points by user") {
    const fs::path dir = fresh_dir("mobmine_pipe_load");
    std::vector<Point> pts = {{40.0, 116.3, 100, "b"}, {40.0, 116.3, 50, "a"},
                              {40.1, 116.3, 200, "b"}};
    {
        std::ofstream out(dir / "points.csv");
        write_points_csv(out, pts);
    }
    PipelineConfig cfg = base_config();
    cfg.input_path = (dir / "points.csv").string();
    std::int64_t rejected = 0;
    const auto by_user = load_input(cfg, &rejected);
    REQUIRE(by_user.size() == 2);
    CHECK(by_user.at("a").size() == 1);
    CHECK(by_user.at("b").size() == 2);
    CHECK(rejected == 0);
}

TEST_CASE("run_pipeline reports a fatal error for a missing input") {
    PipelineConfig cfg = base_config();
    cfg.input_path = "/nonexistent/path/points.csv";
    CHECK_THROWS(run_pipeline(cfg));
}
