#include "mobmine/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mobmine/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mobmine {

namespace {

std::ifstream open_or_throw(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return in;
}

void read_plt_dir(const fs::path& traj_dir, const std::string& user,
                  std::vector<Point>& out, std::int64_t& rejected) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(traj_dir))
        if (e.is_regular_file() && e.path().extension() == ".plt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        auto in = open_or_throw(f);
        ParseResult r = parse_geolife_plt(in, user);
        rejected += r.rejected_lines;
        out.insert(out.end(), std::make_move_iterator(r.points.begin()),
                   std::make_move_iterator(r.points.end()));
    }
}

json place_to_json(const MeaningfulPlace& p) {
    return {{"place_id", p.place_id},
            {"centroid", {{"lat", p.centroid.lat}, {"lon", p.centroid.lon}}},
            {"visit_count", p.visit_count},
            {"rank", p.rank},
            {"tag", to_string(p.tag)}};
}

json gmm_to_json(const GmmModel& m) {
    json means = json::array();
    for (const auto& mu : m.means) means.push_back({mu[0], mu[1]});
    json covs = json::array();
    for (const auto& c : m.covariances) covs.push_back({{"xx", c.xx}, {"xy", c.xy}, {"yy", c.yy}});
    return {{"k", m.k},
            {"weights", m.weights},
            {"means", means},
            {"covariances", covs},
            {"log_likelihood", m.log_likelihood},
            {"bic", m.bic}};
}

json habit_to_json(const Habit& h) {
    return {{"od_pair", {{"origin", h.od_pair.origin}, {"dest", h.od_pair.dest}}},
            {"habit_index", h.component_index},
            {"modal_hour", h.modal_hour},
            {"support", h.support},
            {"trip_ids", h.trip_ids}};
}

json histograms_to_json(const HistogramBundle& b) {
    return {{"hour", b.hour},
            {"dow", b.dow},
            {"hour_dow", b.hour_dow},
            {"length", {{"bin_width_m", b.length_bin_width_m}, {"bins", b.length_bins}}}};
}

json pair_report_to_json(const PairReport& pr) {
    json habits = json::array();
    for (const auto& h : pr.habits) habits.push_back(habit_to_json(h));
    return {{"od_pair", {{"origin", pr.pair.origin}, {"dest", pr.pair.dest}}},
            {"trip_count", pr.trip_count},
            {"gmm", gmm_to_json(pr.model)},
            {"habits", habits},
            {"histograms", histograms_to_json(pr.histograms)}};
}

json cleaning_to_json(const CleaningReport& r) {
    return {{"input_count", r.input_count},
            {"duplicate_count", r.duplicate_count},
            {"outlier_count", r.outlier_count},
            {"output_count", r.output_count}};
}

json report_to_json(const UserReport& r) {
    json places = json::array();
    for (const auto& p : r.places) places.push_back(place_to_json(p));
    json pairs = json::array();
    for (const auto& pr : r.pairs) pairs.push_back(pair_report_to_json(pr));
    return {{"user_id", r.user_id},
            {"cleaning", cleaning_to_json(r.cleaning)},
            {"trajectory_count", r.trajectory_count},
            {"stay_point_count", r.stay_point_count},
            {"place_count", r.place_count},
            {"top_places", places},
            {"habitual_pairs", pairs}};
}

json summary_to_json(const MethodSummary& s) {
    return {{"method", s.method},
            {"cluster_count", s.cluster_count},
            {"noise_count", s.noise_count},
            {"mean_radius_m", s.mean_radius_m},
            {"max_radius_m", s.max_radius_m}};
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

}  // namespace

std::map<std::string, std::vector<Point>> load_input(const PipelineConfig& config,
                                                     std::int64_t* rejected_lines) {
    std::map<std::string, std::vector<Point>> by_user;
    std::int64_t rejected = 0;
    const fs::path input(config.input_path);
    const auto wanted = [&](const std::string& u) {
        return config.users.empty() ||
               std::find(config.users.begin(), config.users.end(), u) != config.users.end();
    };
    switch (config.format) {
        case InputFormat::GEOLIFE: {
            if (!fs::is_directory(input))
                throw std::runtime_error("geolife input must be a directory: " + input.string());
            if (fs::is_directory(input / "Trajectory")) {
                // a single user's directory
                const std::string user = input.filename().string();
                if (wanted(user)) read_plt_dir(input / "Trajectory", user, by_user[user], rejected);
            } else {
                for (const auto& e : fs::directory_iterator(input)) {
                    if (!e.is_directory() || !fs::is_directory(e.path() / "Trajectory")) continue;
                    const std::string user = e.path().filename().string();
                    if (wanted(user))
                        read_plt_dir(e.path() / "Trajectory", user, by_user[user], rejected);
                }
            }
            break;
        }
        case InputFormat::GSM: {
            auto in = open_or_throw(input);
            ParseResult r = parse_gsm_csv(in, config.gsm);
            rejected += r.rejected_lines;
            for (auto& p : r.points)
                if (wanted(p.user_id)) by_user[p.user_id].push_back(std::move(p));
            break;
        }
        case InputFormat::POINTS: {
            auto in = open_or_throw(input);
            for (auto& p : read_points_csv(in))
                if (wanted(p.user_id)) by_user[p.user_id].push_back(std::move(p));
            break;
        }
    }
    if (rejected_lines) *rejected_lines = rejected;
    return by_user;
}

UserAnalysis analyze_user(const std::string& user_id, std::vector<Point> raw_points,
                          const PipelineConfig& config) {
    UserAnalysis a;
    a.user_id = user_id;
    std::tie(a.points, a.cleaning) = clean(std::move(raw_points), config.max_speed_mps);
    a.trajectories = segment_trajectories(a.points, config.segmentation);
    a.stay_points = detect_stay_points(a.points, config.staypoints);

    std::vector<LatLon> sp_centroids;
    sp_centroids.reserve(a.stay_points.size());
    for (const auto& sp : a.stay_points) sp_centroids.push_back({sp.centroid_lat, sp.centroid_lon});
    a.clustering = dbmeans(sp_centroids, config.clustering);
    a.trips = extract_trips(a.trajectories, a.clustering, config.clustering.eps_m);

    UserReport& r = a.report;
    r.user_id = user_id;
    r.cleaning = a.cleaning;
    r.trajectory_count = static_cast<int>(a.trajectories.size());
    r.stay_point_count = static_cast<int>(a.stay_points.size());
    r.place_count = static_cast<int>(a.clustering.centroids.size());
    r.places = rank_places(a.clustering);

    const ODMatrix matrix = build_od_matrix(a.trips);
    for (const ODPair& pair : filter_habitual_pairs(matrix, config.habits.min_trips)) {
        std::vector<Trip> pair_trips;
        for (const auto& t : a.trips)
            if (t.origin_place == pair.origin && t.destination_place == pair.dest)
                pair_trips.push_back(t);
        PairReport pr;
        pr.pair = pair;
        pr.trip_count = static_cast<int>(pair_trips.size());
        pr.model = select_components(cyclic_features(pair_trips), config.habits.k_max,
                                     config.habits.restarts, config.clustering.rng_seed);
        pr.habits = classify_habits(pair_trips, pr.model);
        pr.histograms = emit_histograms(pair_trips, config.length_bin_width_m);
        r.pairs.push_back(std::move(pr));
    }
    return a;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    PipelineResult result;
    auto by_user = load_input(config, &result.rejected_lines);

    std::vector<std::string> user_ids;
    user_ids.reserve(by_user.size());
    for (const auto& [u, _] : by_user) user_ids.push_back(u);

    std::vector<UserAnalysis> analyses(user_ids.size());
    std::vector<char> ok(user_ids.size(), 0);
    std::vector<std::string> errors(user_ids.size());

    const int jobs = std::max(1, config.jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= user_ids.size()) return;
            try {
                analyses[i] = analyze_user(user_ids[i], std::move(by_user[user_ids[i]]), config);
                ok[i] = 1;
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (jobs == 1 || user_ids.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min<int>(jobs, static_cast<int>(user_ids.size())); ++t)
            pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<UserAnalysis> good;
    for (std::size_t i = 0; i < user_ids.size(); ++i) {
        if (!ok[i]) {
            std::cerr << "mobmine: skipping user " << user_ids[i] << ": " << errors[i] << "\n";
            result.skipped_users.push_back(user_ids[i]);
            continue;
        }
        result.total_cleaning.input_count += analyses[i].cleaning.input_count;
        result.total_cleaning.duplicate_count += analyses[i].cleaning.duplicate_count;
        result.total_cleaning.outlier_count += analyses[i].cleaning.outlier_count;
        result.total_cleaning.output_count += analyses[i].cleaning.output_count;
        result.reports.push_back(analyses[i].report);
        good.push_back(std::move(analyses[i]));
    }

    if (!config.out_dir.empty()) {
        fs::create_directories(config.out_dir);
        write_user_dumps(config.out_dir, good);
        write_text(fs::path(config.out_dir) / "cleaning_report.json",
                   cleaning_report_json(result.total_cleaning));
        write_text(fs::path(config.out_dir) / "places.json", places_json(result.reports));
        write_text(fs::path(config.out_dir) / "habits.json", habits_json(result.reports));
        for (const auto& r : result.reports) {
            write_text(fs::path(config.out_dir) / ("report_" + r.user_id + ".json"),
                       user_report_json(r));
            write_histogram_csvs(config.out_dir, r);
        }
    }
    return result;
}

std::string user_report_json(const UserReport& report) {
    return report_to_json(report).dump(2) + "\n";
}

std::string places_json(const std::vector<UserReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports)
        for (const auto& p : r.places) {
            json j = place_to_json(p);
            j["user_id"] = r.user_id;
            arr.push_back(std::move(j));
        }
    return arr.dump(2) + "\n";
}

std::string habits_json(const std::vector<UserReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports)
        for (const auto& pr : r.pairs)
            for (const auto& h : pr.habits) {
                json j = habit_to_json(h);
                j["user_id"] = r.user_id;
                j["gmm"] = gmm_to_json(pr.model);
                arr.push_back(std::move(j));
            }
    return arr.dump(2) + "\n";
}

std::string cleaning_report_json(const CleaningReport& report) {
    return cleaning_to_json(report).dump(2) + "\n";
}

std::string comparison_json(const ClustererComparison& cmp) {
    const json j = {{"dbmeans", summary_to_json(cmp.dbmeans)},
                    {"dbscan", summary_to_json(cmp.dbscan)},
                    {"location_clustering", summary_to_json(cmp.location_clustering)}};
    return j.dump(2) + "\n";
}

void write_histogram_csvs(const std::string& out_dir, const UserReport& report) {
    for (const auto& pr : report.pairs) {
        const std::string stem = "hist_" + report.user_id + "_" + std::to_string(pr.pair.origin) +
                                 "-" + std::to_string(pr.pair.dest);
        {
            std::ofstream out(fs::path(out_dir) / (stem + "_hour.csv"));
            out << "hour,count\n";
            for (int h = 0; h < 24; ++h) out << h << ',' << pr.histograms.hour[h] << '\n';
        }
        {
            std::ofstream out(fs::path(out_dir) / (stem + "_dow.csv"));
            out << "dow,count\n";
            for (int d = 0; d < 7; ++d) out << d << ',' << pr.histograms.dow[d] << '\n';
        }
        {
            std::ofstream out(fs::path(out_dir) / (stem + "_hour_dow.csv"));
            out << "dow,hour,count\n";
            for (int d = 0; d < 7; ++d)
                for (int h = 0; h < 24; ++h)
                    out << d << ',' << h << ',' << pr.histograms.hour_dow[d * 24 + h] << '\n';
        }
        {
            std::ofstream out(fs::path(out_dir) / (stem + "_length.csv"));
            out << "bin_start_m,count\n";
            for (std::size_t b = 0; b < pr.histograms.length_bins.size(); ++b)
                out << fmt_double(static_cast<double>(b) * pr.histograms.length_bin_width_m)
                    << ',' << pr.histograms.length_bins[b] << '\n';
        }
    }
}

void write_user_dumps(const std::string& out_dir, const std::vector<UserAnalysis>& users) {
    {
        std::ofstream out(fs::path(out_dir) / "points.csv");
        out << "user_id,lat,lon,timestamp\n";
        for (const auto& u : users)
            for (const auto& p : u.points)
                out << p.user_id << ',' << fmt_double(p.lat) << ',' << fmt_double(p.lon) << ','
                    << format_timestamp(p.t) << '\n';
    }
    {
        std::vector<TrajectoryRow> rows;
        for (const auto& u : users) {
            for (std::size_t i = 0; i < u.trajectories.size(); ++i) {
                const auto& f = u.trajectories[i].features;
                rows.push_back({u.user_id, static_cast<int>(i), f.start_point.t, f.end_point.t,
                                f.length_m, f.duration_s, f.start_point.lat, f.start_point.lon,
                                f.end_point.lat, f.end_point.lon, f.day_of_week, f.start_hour});
            }
        }
        std::ofstream out(fs::path(out_dir) / "trajectories.csv");
        write_trajectories_csv(out, rows);
    }
    {
        std::map<std::string, std::vector<StayPoint>> by_user;
        for (const auto& u : users) by_user[u.user_id] = u.stay_points;
        std::ofstream out(fs::path(out_dir) / "staypoints.csv");
        write_staypoints_csv(out, by_user);
    }
    {
        std::vector<ClusteringRow> rows;
        for (const auto& u : users) {
            for (std::size_t i = 0; i < u.clustering.labels.size(); ++i) {
                const int l = u.clustering.labels[i];
                ClusteringRow r;
                r.user_id = u.user_id;
                r.sp_id = static_cast<int>(i);
                r.label = l;
                if (l >= 0) {
                    r.centroid_lat = u.clustering.centroids[l].lat;
                    r.centroid_lon = u.clustering.centroids[l].lon;
                }
                rows.push_back(std::move(r));
            }
        }
        std::ofstream out(fs::path(out_dir) / "clustering.csv");
        write_clustering_csv(out, rows);
    }
}

}  // namespace mobmine
