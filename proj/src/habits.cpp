#include "mobmine/habits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mobmine {

namespace {

constexpr double kCovFloor = 1e-2;
constexpr double kEmTolerance = 1e-7;
constexpr int kEmMaxIterations = 500;

double sq(double v) { return v * v; }

// Raise the eigenvalues of a symmetric 2x2 matrix to at least kCovFloor,
// keeping the eigenvectors. On the unit circle the floor doubles as a scale
// guard: it stops components from collapsing onto the curvature of the hour
// ring, which would otherwise let BIC buy likelihood with sliver components.
Cov2 clamp_cov(const Cov2& s) {
    const double half_tr = 0.5 * (s.xx + s.yy);
    const double disc = std::sqrt(std::max(0.0, sq(0.5 * (s.xx - s.yy)) + sq(s.xy)));
    const double lo = half_tr - disc;
    if (lo >= kCovFloor) return s;
    const double hi = std::max(half_tr + disc, kCovFloor);
    if (s.xy == 0.0) return {std::max(s.xx, kCovFloor), 0.0, std::max(s.yy, kCovFloor)};
    // eigenvector for the larger eigenvalue
    const double ux = (half_tr + disc) - s.yy;
    const double uy = s.xy;
    const double n2 = ux * ux + uy * uy;
    return {(hi * ux * ux + kCovFloor * uy * uy) / n2,
            (hi - kCovFloor) * ux * uy / n2,
            (hi * uy * uy + kCovFloor * ux * ux) / n2};
}

// log N(x; mu, cov) for a full 2x2 covariance
double log_gauss2(const Feature2& x, const Feature2& mu, const Cov2& cov) {
    const double det = cov.xx * cov.yy - cov.xy * cov.xy;
    const double dx = x[0] - mu[0];
    const double dy = x[1] - mu[1];
    const double quad = (cov.yy * dx * dx - 2.0 * cov.xy * dx * dy + cov.xx * dy * dy) / det;
    return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * quad;
}

// one E pass: fills resp (if non-null) and returns the total log-likelihood
double e_step(const std::vector<Feature2>& x, const std::vector<double>& w,
              const std::vector<Feature2>& mu, const std::vector<Cov2>& cov,
              std::vector<std::vector<double>>* resp) {
    const std::size_t n = x.size();
    const std::size_t k = w.size();
    double ll = 0.0;
    std::vector<double> logp(k);
    for (std::size_t i = 0; i < n; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            logp[j] = w[j] > 0.0 ? std::log(w[j]) + log_gauss2(x[i], mu[j], cov[j])
                                 : -std::numeric_limits<double>::infinity();
            mx = std::max(mx, logp[j]);
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) sum += std::exp(logp[j] - mx);
        const double lse = mx + std::log(sum);
        ll += lse;
        if (resp) {
            for (std::size_t j = 0; j < k; ++j) (*resp)[i][j] = std::exp(logp[j] - lse);
        }
    }
    return ll;
}

std::vector<Feature2> farthest_point_seeds(const std::vector<Feature2>& x, int k,
                                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Feature2> seeds;
    seeds.reserve(k);
    const std::size_t first = std::uniform_int_distribution<std::size_t>(0, x.size() - 1)(rng);
    seeds.push_back(x[first]);
    std::vector<double> d2(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        d2[i] = sq(x[i][0] - x[first][0]) + sq(x[i][1] - x[first][1]);
    while (static_cast<int>(seeds.size()) < k) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < x.size(); ++i)
            if (d2[i] > d2[best]) best = i;
        seeds.push_back(x[best]);
        for (std::size_t i = 0; i < x.size(); ++i)
            d2[i] = std::min(d2[i], sq(x[i][0] - x[best][0]) + sq(x[i][1] - x[best][1]));
    }
    return seeds;
}

}  // namespace

std::vector<Trip> extract_trips(const std::vector<Trajectory>& trajectories,
                                const PlaceClustering& clustering, double eps_m) {
    std::vector<LatLon> endpoints;
    endpoints.reserve(trajectories.size() * 2);
    for (const auto& t : trajectories) {
        endpoints.push_back({t.features.start_point.lat, t.features.start_point.lon});
        endpoints.push_back({t.features.end_point.lat, t.features.end_point.lon});
    }
    const std::vector<int> labels = predict(endpoints, clustering.centroids, eps_m);
    std::vector<Trip> trips;
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const int o = labels[2 * i];
        const int d = labels[2 * i + 1];
        if (o == kNoise || d == kNoise) continue;
        const auto& f = trajectories[i].features;
        trips.push_back({static_cast<int>(i), o, d, f.start_hour, f.day_of_week,
                         f.length_m, f.duration_s});
    }
    return trips;
}

ODMatrix build_od_matrix(const std::vector<Trip>& trips) {
    ODMatrix m;
    for (const auto& t : trips) ++m.counts[{t.origin_place, t.destination_place}];
    return m;
}

std::vector<ODPair> filter_habitual_pairs(const ODMatrix& matrix, int min_trips) {
    std::vector<ODPair> out;
    for (const auto& [pair, count] : matrix.counts)
        if (count >= min_trips) out.push_back(pair);
    std::stable_sort(out.begin(), out.end(), [&](const ODPair& a, const ODPair& b) {
        return matrix.counts.at(a) > matrix.counts.at(b);
    });
    return out;
}

std::vector<Feature2> cyclic_features(const std::vector<Trip>& trips) {
    std::vector<Feature2> f;
    f.reserve(trips.size());
    for (const auto& t : trips) {
        const CyclicHour c = encode_hour_cyclic(t.start_hour);
        f.push_back({c.sin_h, c.cos_h});
    }
    return f;
}

GmmModel fit_gmm(const std::vector<Feature2>& features, int k, std::uint64_t rng_seed) {
    const std::size_t n = features.size();
    if (k < 1) throw std::invalid_argument("fit_gmm: k must be >= 1");
    if (static_cast<std::size_t>(k) > n)
        throw std::invalid_argument("fit_gmm: k exceeds the number of points");

    GmmModel m;
    m.k = k;
    m.weights.assign(k, 0.0);
    m.means = farthest_point_seeds(features, k, rng_seed);
    m.covariances.assign(k, Cov2{kCovFloor, 0.0, kCovFloor});

    // hard-assign every point to its nearest seed and take cluster statistics;
    // a shared broad covariance would blur the responsibilities so much that
    // EM crawls along the symmetric ridge and never separates obvious modes
    {
        std::vector<int> owner(n, 0);
        std::vector<double> cnt(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < k; ++j) {
                const double d2 = sq(features[i][0] - m.means[j][0]) +
                                  sq(features[i][1] - m.means[j][1]);
                if (d2 < best) {
                    best = d2;
                    owner[i] = j;
                }
            }
            cnt[owner[i]] += 1.0;
        }
        std::vector<Feature2> sum(k, Feature2{0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i) {
            sum[owner[i]][0] += features[i][0];
            sum[owner[i]][1] += features[i][1];
        }
        for (int j = 0; j < k; ++j) {
            m.weights[j] = cnt[j] / static_cast<double>(n);
            if (cnt[j] > 0.0) m.means[j] = {sum[j][0] / cnt[j], sum[j][1] / cnt[j]};
        }
        std::vector<Cov2> acc(k, Cov2{0.0, 0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i) {
            const int j = owner[i];
            const double dx = features[i][0] - m.means[j][0];
            const double dy = features[i][1] - m.means[j][1];
            acc[j].xx += dx * dx;
            acc[j].xy += dx * dy;
            acc[j].yy += dy * dy;
        }
        for (int j = 0; j < k; ++j) {
            if (cnt[j] > 0.0)
                m.covariances[j] = clamp_cov(
                    {acc[j].xx / cnt[j], acc[j].xy / cnt[j], acc[j].yy / cnt[j]});
        }
    }

    std::vector<std::vector<double>> resp(n, std::vector<double>(k));
    bool converged = false;
    for (int iter = 0; iter < kEmMaxIterations && !converged; ++iter) {
        const double ll = e_step(features, m.weights, m.means, m.covariances, &resp);
        converged = !m.ll_history.empty() && ll - m.ll_history.back() < kEmTolerance;
        m.ll_history.push_back(ll);
        if (converged) break;
        // M step
        for (int j = 0; j < k; ++j) {
            double nk = 0.0, sx = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                nk += resp[i][j];
                sx += resp[i][j] * features[i][0];
                sy += resp[i][j] * features[i][1];
            }
            m.weights[j] = nk / static_cast<double>(n);
            const double denom = std::max(nk, 1e-12);
            const double ux = sx / denom;
            const double uy = sy / denom;
            Cov2 cov{0.0, 0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i) {
                const double dx = features[i][0] - ux;
                const double dy = features[i][1] - uy;
                cov.xx += resp[i][j] * dx * dx / denom;
                cov.xy += resp[i][j] * dx * dy / denom;
                cov.yy += resp[i][j] * dy * dy / denom;
            }
            m.means[j] = {ux, uy};
            m.covariances[j] = clamp_cov(cov);
        }
    }
    if (!converged)  // iteration cap hit after an M step: evaluate the final params
        m.ll_history.push_back(e_step(features, m.weights, m.means, m.covariances, nullptr));
    m.log_likelihood = m.ll_history.back();

    // prune collapsed components, then merge duplicates
    const double floor_weight = 1.0 / (2.0 * static_cast<double>(n));
    std::vector<int> keep;
    for (int j = 0; j < k; ++j)
        if (m.weights[j] >= floor_weight) keep.push_back(j);
    std::vector<double> w2;
    std::vector<Feature2> mu2;
    std::vector<Cov2> cov2;
    for (int j : keep) {
        bool merged = false;
        for (std::size_t e = 0; e < mu2.size(); ++e) {
            const bool same_mean = std::abs(mu2[e][0] - m.means[j][0]) < 1e-6 &&
                                   std::abs(mu2[e][1] - m.means[j][1]) < 1e-6;
            const bool same_cov = std::abs(cov2[e].xx - m.covariances[j].xx) < 1e-6 &&
                                  std::abs(cov2[e].xy - m.covariances[j].xy) < 1e-6 &&
                                  std::abs(cov2[e].yy - m.covariances[j].yy) < 1e-6;
            if (same_mean && same_cov) {
                w2[e] += m.weights[j];
                merged = true;
                break;
            }
        }
        if (!merged) {
            w2.push_back(m.weights[j]);
            mu2.push_back(m.means[j]);
            cov2.push_back(m.covariances[j]);
        }
    }
    m.pruned_components = k - static_cast<int>(w2.size());
    if (m.pruned_components > 0) {
        double wsum = 0.0;
        for (double w : w2) wsum += w;
        for (double& w : w2) w /= wsum;
        m.k = static_cast<int>(w2.size());
        m.weights = std::move(w2);
        m.means = std::move(mu2);
        m.covariances = std::move(cov2);
        m.log_likelihood = e_step(features, m.weights, m.means, m.covariances, nullptr);
    }
    const double p = 6.0 * m.k - 1.0;
    m.bic = -2.0 * m.log_likelihood + p * std::log(static_cast<double>(n));
    return m;
}

GmmModel select_components(const std::vector<Feature2>& features, int k_max, int restarts,
                           std::uint64_t rng_seed) {
    if (features.empty())
        throw std::invalid_argument("select_components: empty feature set");
    const int top = std::min<int>(k_max, static_cast<int>(features.size()));
    GmmModel best;
    bool have = false;
    for (int k = 1; k <= top; ++k) {
        for (int r = 0; r < restarts; ++r) {
            const std::uint64_t seed =
                rng_seed + 1000003ull * static_cast<std::uint64_t>(k) +
                7919ull * static_cast<std::uint64_t>(r);
            GmmModel m = fit_gmm(features, k, seed);
            if (!have || m.bic < best.bic) {
                best = std::move(m);
                have = true;
            }
        }
    }
    return best;
}

std::vector<std::vector<double>> responsibilities(const GmmModel& model,
                                                  const std::vector<Feature2>& features) {
    std::vector<std::vector<double>> resp(features.size(), std::vector<double>(model.k));
    e_step(features, model.weights, model.means, model.covariances, &resp);
    return resp;
}

double circular_mean_hour(const std::vector<double>& hours) {
    double s = 0.0, c = 0.0;
    for (double h : hours) {
        const double theta = 2.0 * std::numbers::pi * h / 24.0;
        s += std::sin(theta);
        c += std::cos(theta);
    }
    double hour = std::atan2(s, c) * 24.0 / (2.0 * std::numbers::pi);
    if (hour < 0.0) hour += 24.0;
    if (hour >= 24.0) hour = 0.0;
    return hour;
}

std::vector<Habit> classify_habits(const std::vector<Trip>& trips, const GmmModel& model) {
    std::vector<Habit> out;
    if (trips.empty()) return out;
    const auto resp = responsibilities(model, cyclic_features(trips));
    std::vector<std::vector<std::size_t>> members(model.k);
    for (std::size_t i = 0; i < trips.size(); ++i) {
        int best = 0;
        for (int j = 1; j < model.k; ++j)
            if (resp[i][j] > resp[i][best]) best = j;
        members[best].push_back(i);
    }
    const ODPair pair{trips.front().origin_place, trips.front().destination_place};
    for (int j = 0; j < model.k; ++j) {
        if (members[j].empty()) continue;
        Habit h;
        h.od_pair = pair;
        h.component_index = j;
        std::vector<double> hours;
        for (std::size_t i : members[j]) {
            h.trip_ids.push_back(trips[i].trajectory_id);
            hours.push_back(trips[i].start_hour);
        }
        h.modal_hour = circular_mean_hour(hours);
        h.support = static_cast<int>(members[j].size());
        out.push_back(std::move(h));
    }
    return out;
}

}  // namespace mobmine
