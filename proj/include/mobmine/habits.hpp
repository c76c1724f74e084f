#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <vector>

#include "mobmine/clustering.hpp"
#include "mobmine/core.hpp"

namespace mobmine {

struct Trip {
    int trajectory_id = 0;
    int origin_place = 0;
    int destination_place = 0;
    double start_hour = 0.0;
    int day_of_week = 0;
    double length_m = 0.0;
    double duration_s = 0.0;
};

struct ODPair {
    int origin = 0;
    int dest = 0;
    friend auto operator<=>(const ODPair&, const ODPair&) = default;
};

struct ODMatrix {
    std::map<ODPair, int> counts;  // directional: A->B distinct from B->A
};

using Feature2 = std::array<double, 2>;  // (sin, cos) of the start hour

struct Cov2 {  // symmetric 2x2
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
};

struct GmmModel {
    int k = 0;
    std::vector<double> weights;
    std::vector<Feature2> means;
    std::vector<Cov2> covariances;
    double log_likelihood = 0.0;
    double bic = 0.0;
    std::vector<double> ll_history;  // one entry per EM iteration
    int pruned_components = 0;       // collapsed/duplicate components removed after EM
};

struct Habit {
    ODPair od_pair;
    int component_index = 0;
    std::vector<int> trip_ids;
    double modal_hour = 0.0;  // circular mean of member start hours
    int support = 0;
};

// A trajectory becomes a trip iff predict() maps both its start and its end
// point to non-noise places.
std::vector<Trip> extract_trips(const std::vector<Trajectory>& trajectories,
                                const PlaceClustering& clustering, double eps_m);

ODMatrix build_od_matrix(const std::vector<Trip>& trips);

// Pairs with count >= min_trips, sorted by descending count (ties by pair id).
std::vector<ODPair> filter_habitual_pairs(const ODMatrix& matrix, int min_trips = 5);

std::vector<Feature2> cyclic_features(const std::vector<Trip>& trips);

// EM with farthest-point seeding, full 2x2 covariances with a 1e-6 diagonal
// floor, convergence at log-likelihood gain < 1e-7 or 500 iterations; collapsed
// (weight < 1/(2n)) and duplicate components are pruned afterwards.
// Throws std::invalid_argument when k < 1 or k > feature count.
GmmModel fit_gmm(const std::vector<Feature2>& features, int k, std::uint64_t rng_seed);

// Fits k = 1..min(k_max, n) with `restarts` seeded restarts each and returns
// the model with the lowest BIC = -2*ll + p*ln(n), p = 6k - 1.
GmmModel select_components(const std::vector<Feature2>& features, int k_max = 6,
                           int restarts = 5, std::uint64_t rng_seed = 0);

// E-step responsibilities of `model` for `features`; each row sums to 1.
std::vector<std::vector<double>> responsibilities(const GmmModel& model,
                                                  const std::vector<Feature2>& features);

// Hard-assigns each trip to its max-responsibility component (ties to the
// lower component) and summarizes the non-empty components.
std::vector<Habit> classify_habits(const std::vector<Trip>& trips, const GmmModel& model);

double circular_mean_hour(const std::vector<double>& hours);  // result in [0, 24)

}  // namespace mobmine
