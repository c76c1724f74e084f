#pragma once

#include <map>
#include <string>
#include <vector>

#include "mobmine/clustering.hpp"
#include "mobmine/core.hpp"
#include "mobmine/habits.hpp"
#include "mobmine/ingest.hpp"
#include "mobmine/report.hpp"
#include "mobmine/segmentation.hpp"
#include "mobmine/staypoints.hpp"

namespace mobmine {

enum class InputFormat { GEOLIFE, GSM, POINTS };

struct HabitConfig {
    int min_trips = 5;
    int k_max = 6;
    int restarts = 5;
};

struct PipelineConfig {
    std::string input_path;
    InputFormat format = InputFormat::GEOLIFE;
    std::vector<std::string> users;  // empty = all
    double max_speed_mps = 50.0;
    SegmentationParams segmentation;
    StayPointParams staypoints;
    ClusterParams clustering;
    HabitConfig habits;
    GsmCsvLayout gsm;
    double length_bin_width_m = 250.0;
    std::string out_dir;  // empty = compute only, write nothing
    int jobs = 1;
};

struct PairReport {
    ODPair pair;
    int trip_count = 0;
    GmmModel model;
    std::vector<Habit> habits;
    HistogramBundle histograms;
};

struct UserReport {
    std::string user_id;
    CleaningReport cleaning;
    int trajectory_count = 0;
    int stay_point_count = 0;
    int place_count = 0;
    std::vector<MeaningfulPlace> places;  // ranked
    std::vector<PairReport> pairs;        // habitual pairs, by descending trip count
};

// Everything the pipeline derives for one user, kept for dumps and tests.
struct UserAnalysis {
    std::string user_id;
    CleaningReport cleaning;
    std::vector<Point> points;  // cleaned
    std::vector<Trajectory> trajectories;
    std::vector<StayPoint> stay_points;
    PlaceClustering clustering;
    std::vector<Trip> trips;
    UserReport report;
};

struct PipelineResult {
    std::vector<UserReport> reports;         // sorted by user id
    std::vector<std::string> skipped_users;  // users whose analysis threw
    CleaningReport total_cleaning;
    std::int64_t rejected_lines = 0;
};

// Core per-user pipeline: clean -> segment -> stay points -> dbmeans ->
// trips -> habits. Pure; callers may fan users out across threads.
UserAnalysis analyze_user(const std::string& user_id, std::vector<Point> raw_points,
                          const PipelineConfig& config);

// Groups raw input into per-user point lists (format-dependent discovery).
// Throws std::runtime_error for unreadable paths.
std::map<std::string, std::vector<Point>> load_input(const PipelineConfig& config,
                                                     std::int64_t* rejected_lines = nullptr);

// load_input + analyze_user over a worker pool + all dump files (when out_dir
// is set). Per-user failures skip the user; everything else is deterministic
// for a fixed config, independent of jobs.
PipelineResult run_pipeline(const PipelineConfig& config);

// JSON/CSV emission helpers (also used by the CLI verbs).
std::string user_report_json(const UserReport& report);
std::string places_json(const std::vector<UserReport>& reports);
std::string habits_json(const std::vector<UserReport>& reports);
std::string cleaning_report_json(const CleaningReport& report);
std::string comparison_json(const ClustererComparison& cmp);
void write_histogram_csvs(const std::string& out_dir, const UserReport& report);
void write_user_dumps(const std::string& out_dir, const std::vector<UserAnalysis>& users);

}  // namespace mobmine
