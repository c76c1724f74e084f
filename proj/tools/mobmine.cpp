#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mobmine/io.hpp"
#include "mobmine/pipeline.hpp"

namespace fs = std::filesystem;
using namespace mobmine;

namespace {

struct Options {
    std::string input;
    std::string format = "geolife";
    std::vector<std::string> users;
    std::string out = "out";
    double eps = 200.0;
    int min_pts = 5;
    double dist_th = 200.0;
    double time_th = 1200.0;
    double gap = 1800.0;
    double stop_speed = 0.5;
    double stop_window = 300.0;
    double max_speed = 50.0;
    int min_trips = 5;
    int k_max = 6;
    int restarts = 5;
    std::uint64_t seed = 0;
    int jobs = 1;
    double length_bin_width = 250.0;
    std::string gsm_delim = ",";
    int gsm_user_col = 0;
    int gsm_lat_col = 1;
    int gsm_lon_col = 2;
    int gsm_time_col = 3;
};

void add_common_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--input", o.input, "input path (dataset dir, csv file, or dump file)");
    cmd->add_option("--format", o.format, "input format")
        ->check(CLI::IsMember({"geolife", "gsm", "points"}));
    cmd->add_option("--user", o.users, "restrict to user id (repeatable)");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--eps", o.eps, "clustering radius, meters");
    cmd->add_option("--min-pts", o.min_pts, "minimum cluster membership");
    cmd->add_option("--dist-th", o.dist_th, "stay point distance threshold, meters");
    cmd->add_option("--time-th", o.time_th, "stay point time threshold, seconds");
    cmd->add_option("--gap", o.gap, "trajectory gap threshold, seconds");
    cmd->add_option("--stop-speed", o.stop_speed, "stop rule: mean speed floor, m/s");
    cmd->add_option("--stop-window", o.stop_window, "stop rule: trailing window, seconds");
    cmd->add_option("--max-speed", o.max_speed, "cleaning speed gate, m/s");
    cmd->add_option("--min-trips", o.min_trips, "habitual OD pair floor");
    cmd->add_option("--k-max", o.k_max, "max GMM components");
    cmd->add_option("--restarts", o.restarts, "GMM restarts per k");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--jobs", o.jobs, "parallel user workers");
    cmd->add_option("--length-bin-width", o.length_bin_width, "length histogram bin width, meters");
    cmd->add_option("--gsm-delim", o.gsm_delim, "GSM csv delimiter");
    cmd->add_option("--gsm-user-col", o.gsm_user_col, "GSM csv user column");
    cmd->add_option("--gsm-lat-col", o.gsm_lat_col, "GSM csv latitude column");
    cmd->add_option("--gsm-lon-col", o.gsm_lon_col, "GSM csv longitude column");
    cmd->add_option("--gsm-time-col", o.gsm_time_col, "GSM csv timestamp column");
    cmd->set_config("--config", "", "flat key=value config file; flags override");
    cmd->allow_config_extras(true);
}

PipelineConfig to_config(const Options& o) {
    PipelineConfig c;
    c.input_path = o.input;
    c.format = o.format == "gsm"      ? InputFormat::GSM
               : o.format == "points" ? InputFormat::POINTS
                                      : InputFormat::GEOLIFE;
    c.users = o.users;
    c.max_speed_mps = o.max_speed;
    c.segmentation = {o.gap, o.stop_speed, o.stop_window};
    c.staypoints = {o.dist_th, o.time_th};
    c.clustering = {o.eps, o.min_pts, o.seed};
    c.habits = {o.min_trips, o.k_max, o.restarts};
    c.gsm.delimiter = o.gsm_delim.empty() ? ',' : o.gsm_delim[0];
    c.gsm.user_col = o.gsm_user_col;
    c.gsm.lat_col = o.gsm_lat_col;
    c.gsm.lon_col = o.gsm_lon_col;
    c.gsm.time_col = o.gsm_time_col;
    c.length_bin_width_m = o.length_bin_width;
    c.out_dir = o.out;
    c.jobs = o.jobs;
    return c;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

int run_ingest(const Options& o) {
    const PipelineConfig cfg = to_config(o);
    std::int64_t rejected = 0;
    auto by_user = load_input(cfg, &rejected);
    CleaningReport total;
    std::vector<Point> all;
    for (auto& [user, pts] : by_user) {
        auto [cleaned, rep] = clean(std::move(pts), cfg.max_speed_mps);
        total.input_count += rep.input_count;
        total.duplicate_count += rep.duplicate_count;
        total.outlier_count += rep.outlier_count;
        total.output_count += rep.output_count;
        all.insert(all.end(), cleaned.begin(), cleaned.end());
    }
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream out(fs::path(cfg.out_dir) / "points.csv");
        write_points_csv(out, all);
    }
    write_text(fs::path(cfg.out_dir) / "cleaning_report.json", cleaning_report_json(total));
    std::cout << "ingest: " << by_user.size() << " user(s), " << total.output_count
              << " points kept (" << total.duplicate_count << " duplicates, "
              << total.outlier_count << " outliers, " << rejected << " rejected lines)\n";
    return 0;
}

int run_staypoints(const Options& o) {
    const PipelineConfig cfg = to_config(o);
    auto by_user = load_input(cfg, nullptr);
    std::map<std::string, std::vector<StayPoint>> sps;
    int skipped = 0;
    for (auto& [user, pts] : by_user) {
        try {
            auto [cleaned, rep] = clean(std::move(pts), cfg.max_speed_mps);
            sps[user] = detect_stay_points(cleaned, cfg.staypoints);
        } catch (const std::exception& e) {
            std::cerr << "mobmine: skipping user " << user << ": " << e.what() << "\n";
            ++skipped;
        }
    }
    fs::create_directories(cfg.out_dir);
    std::ofstream out(fs::path(cfg.out_dir) / "staypoints.csv");
    write_staypoints_csv(out, sps);
    std::size_t n = 0;
    for (const auto& [_, v] : sps) n += v.size();
    std::cout << "staypoints: " << n << " stay points across " << sps.size() << " user(s)\n";
    return skipped > 0 ? 2 : 0;
}

int run_cluster(const Options& o) {
    const PipelineConfig cfg = to_config(o);
    std::ifstream in(o.input);
    if (!in) throw std::runtime_error("cannot open " + o.input);
    auto by_user = read_staypoints_csv(in);
    std::vector<UserReport> reports;
    std::vector<ClusteringRow> rows;
    int skipped = 0;
    for (const auto& [user, sps] : by_user) {
        if (!cfg.users.empty() &&
            std::find(cfg.users.begin(), cfg.users.end(), user) == cfg.users.end())
            continue;
        try {
            std::vector<LatLon> pts;
            pts.reserve(sps.size());
            for (const auto& sp : sps) pts.push_back({sp.centroid_lat, sp.centroid_lon});
            const PlaceClustering pc = dbmeans(pts, cfg.clustering);
            for (std::size_t i = 0; i < pc.labels.size(); ++i) {
                ClusteringRow r;
                r.user_id = user;
                r.sp_id = static_cast<int>(i);
                r.label = pc.labels[i];
                if (r.label >= 0) {
                    r.centroid_lat = pc.centroids[r.label].lat;
                    r.centroid_lon = pc.centroids[r.label].lon;
                }
                rows.push_back(std::move(r));
            }
            UserReport rep;
            rep.user_id = user;
            rep.place_count = static_cast<int>(pc.centroids.size());
            rep.places = rank_places(pc);
            reports.push_back(std::move(rep));
        } catch (const std::exception& e) {
            std::cerr << "mobmine: skipping user " << user << ": " << e.what() << "\n";
            ++skipped;
        }
    }
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream out(fs::path(cfg.out_dir) / "clustering.csv");
        write_clustering_csv(out, rows);
    }
    write_text(fs::path(cfg.out_dir) / "places.json", places_json(reports));
    std::size_t k = 0;
    for (const auto& r : reports) k += r.places.size();
    std::cout << "cluster: " << k << " places across " << reports.size() << " user(s)\n";
    return skipped > 0 ? 2 : 0;
}

int run_habits(const Options& o) {
    const PipelineConfig cfg = to_config(o);
    const fs::path dir(o.input);
    std::ifstream cin_(dir / "clustering.csv");
    if (!cin_) throw std::runtime_error("cannot open " + (dir / "clustering.csv").string());
    const auto cluster_rows = read_clustering_csv(cin_);

    // trajectories.csv exists after a full report run; a stage-by-stage run
    // only has points.csv, so segment those here with the same config
    std::vector<TrajectoryRow> traj_rows;
    if (std::ifstream tin{dir / "trajectories.csv"}) {
        traj_rows = read_trajectories_csv(tin);
    } else {
        std::ifstream pin(dir / "points.csv");
        if (!pin)
            throw std::runtime_error("cannot open " + (dir / "trajectories.csv").string() +
                                     " or " + (dir / "points.csv").string());
        std::map<std::string, std::vector<Point>> by_user;
        for (auto& p : read_points_csv(pin)) by_user[p.user_id].push_back(std::move(p));
        for (const auto& [user, pts] : by_user) {
            const auto trajectories = segment_trajectories(pts, cfg.segmentation);
            for (std::size_t i = 0; i < trajectories.size(); ++i) {
                const auto& f = trajectories[i].features;
                traj_rows.push_back({user, static_cast<int>(i), f.start_point.t, f.end_point.t,
                                     f.length_m, f.duration_s, f.start_point.lat,
                                     f.start_point.lon, f.end_point.lat, f.end_point.lon,
                                     f.day_of_week, f.start_hour});
            }
        }
    }

    std::map<std::string, std::vector<LatLon>> centroids_by_user;
    for (const auto& r : cluster_rows) {
        auto& cs = centroids_by_user[r.user_id];
        if (static_cast<int>(cs.size()) <= r.label) cs.resize(r.label + 1);
        cs[r.label] = {r.centroid_lat, r.centroid_lon};
    }

    std::map<std::string, std::vector<Trip>> trips_by_user;
    for (const auto& row : traj_rows) {
        if (!cfg.users.empty() &&
            std::find(cfg.users.begin(), cfg.users.end(), row.user_id) == cfg.users.end())
            continue;
        const auto it = centroids_by_user.find(row.user_id);
        if (it == centroids_by_user.end()) continue;
        const std::vector<int> labels =
            predict({{row.start_lat, row.start_lon}, {row.end_lat, row.end_lon}},
                    it->second, cfg.clustering.eps_m);
        if (labels[0] == kNoise || labels[1] == kNoise) continue;
        trips_by_user[row.user_id].push_back({row.traj_id, labels[0], labels[1], row.start_hour,
                                              row.dow, row.length_m, row.duration_s});
    }

    std::vector<UserReport> reports;
    int skipped = 0;
    for (const auto& [user, trips] : trips_by_user) {
        try {
            UserReport rep;
            rep.user_id = user;
            const ODMatrix matrix = build_od_matrix(trips);
            for (const ODPair& pair : filter_habitual_pairs(matrix, cfg.habits.min_trips)) {
                std::vector<Trip> pair_trips;
                for (const auto& t : trips)
                    if (t.origin_place == pair.origin && t.destination_place == pair.dest)
                        pair_trips.push_back(t);
                PairReport pr;
                pr.pair = pair;
                pr.trip_count = static_cast<int>(pair_trips.size());
                pr.model = select_components(cyclic_features(pair_trips), cfg.habits.k_max,
                                             cfg.habits.restarts, cfg.clustering.rng_seed);
                pr.habits = classify_habits(pair_trips, pr.model);
                pr.histograms = emit_histograms(pair_trips, cfg.length_bin_width_m);
                rep.pairs.push_back(std::move(pr));
            }
            reports.push_back(std::move(rep));
        } catch (const std::exception& e) {
            std::cerr << "mobmine: skipping user " << user << ": " << e.what() << "\n";
            ++skipped;
        }
    }
    fs::create_directories(cfg.out_dir);
    write_text(fs::path(cfg.out_dir) / "habits.json", habits_json(reports));
    std::size_t n = 0;
    for (const auto& r : reports)
        for (const auto& p : r.pairs) n += p.habits.size();
    std::cout << "habits: " << n << " habit(s) across " << reports.size() << " user(s)\n";
    return skipped > 0 ? 2 : 0;
}

int run_report(const Options& o) {
    const PipelineConfig cfg = to_config(o);
    const PipelineResult res = run_pipeline(cfg);
    std::cout << "report: " << res.reports.size() << " user(s) analyzed";
    if (!res.skipped_users.empty())
        std::cout << ", " << res.skipped_users.size() << " skipped";
    std::cout << "\n";
    for (const auto& r : res.reports)
        std::cout << "  user " << r.user_id << ": " << r.trajectory_count << " trajectories, "
                  << r.stay_point_count << " stay points, " << r.place_count << " places, "
                  << r.pairs.size() << " habitual pair(s)\n";
    return res.skipped_users.empty() ? 0 : 2;
}

int run_compare(const Options& o) {
    const PipelineConfig cfg = to_config(o);
    std::ifstream in(o.input);
    if (!in) throw std::runtime_error("cannot open " + o.input);
    std::string header;
    std::getline(in, header);
    in.seekg(0);
    std::vector<LatLon> pts;
    const auto wanted = [&](const std::string& u) {
        return cfg.users.empty() ||
               std::find(cfg.users.begin(), cfg.users.end(), u) != cfg.users.end();
    };
    if (header.rfind("user_id,sp_id,", 0) == 0) {
        for (const auto& [user, sps] : read_staypoints_csv(in))
            if (wanted(user))
                for (const auto& sp : sps) pts.push_back({sp.centroid_lat, sp.centroid_lon});
    } else {
        for (const auto& p : read_points_csv(in))
            if (wanted(p.user_id)) pts.push_back({p.lat, p.lon});
    }
    const ClustererComparison cmp = compare_clusterers(pts, cfg.clustering);
    fs::create_directories(cfg.out_dir);
    write_text(fs::path(cfg.out_dir) / "comparison.json", comparison_json(cmp));
    std::cout << "compare: dbmeans=" << cmp.dbmeans.cluster_count
              << " dbscan=" << cmp.dbscan.cluster_count
              << " location_clustering=" << cmp.location_clustering.cluster_count << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mobility mining: trajectories, stay points, meaningful places, habits"};
    app.require_subcommand(1);
    Options o;
    auto* ingest_cmd = app.add_subcommand("ingest", "parse and clean raw fixes into points.csv");
    auto* staypoints_cmd = app.add_subcommand("staypoints", "detect stay points");
    auto* cluster_cmd = app.add_subcommand("cluster", "cluster stay points into places");
    auto* habits_cmd = app.add_subcommand("habits", "GMM habits over habitual OD pairs");
    auto* report_cmd = app.add_subcommand("report", "full pipeline with all dump files");
    auto* compare_cmd = app.add_subcommand("compare", "run all three clusterers on one input");
    for (auto* cmd : {ingest_cmd, staypoints_cmd, cluster_cmd, habits_cmd, report_cmd, compare_cmd})
        add_common_flags(cmd, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest_cmd->parsed()) return run_ingest(o);
        if (staypoints_cmd->parsed()) return run_staypoints(o);
        if (cluster_cmd->parsed()) return run_cluster(o);
        if (habits_cmd->parsed()) return run_habits(o);
        if (report_cmd->parsed()) return run_report(o);
        if (compare_cmd->parsed()) return run_compare(o);
    } catch (const std::exception& e) {
        std::cerr << "mobmine: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
