#include "sodacer/replay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sodacer/errors.hpp"

namespace sodacer {

double membership(const Sample& sample, const Cluster& cluster) {
    const double d2 = squared_distance(sample.concat(), cluster.center);
    return std::exp(-d2 / (2.0 * cluster.sigma * cluster.sigma));
}

Sample FastBuffer::pop_oldest() {
    Sample s = samples_.front();
    samples_.pop_front();
    return s;
}

AbsorbReport SlowBuffer::absorb(const Sample& s, const ReplayConfig& cfg) {
    return absorb_impl(s, cfg, /*amplify=*/true);
}

AbsorbReport SlowBuffer::cber_absorb(const Sample& s, const ReplayConfig& cfg) {
    return absorb_impl(s, cfg, /*amplify=*/false);
}

AbsorbReport SlowBuffer::absorb_impl(const Sample& s, const ReplayConfig& cfg, bool amplify) {
    double best = -1.0;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < clusters_.size(); ++i) {
        const double mu = membership(s, clusters_[i]);
        if (mu > best) {
            best = mu;
            best_idx = i;
        }
    }

    if (best <= cfg.gamma_th) {
        if (clusters_.size() + 1 > static_cast<std::size_t>(cfg.max_clusters))
            throw ClusterCapacityExceeded(
                "slow buffer would exceed max_clusters = " + std::to_string(cfg.max_clusters));
        Cluster c;
        c.center = s.concat();
        c.sigma = cfg.sigma0;
        c.count = 1;
        c.id = next_id_++;
        clusters_.push_back(c);
        return {true, c.id};
    }

    Cluster& c = clusters_[best_idx];
    const Vec10 point = s.concat();
    const double n = static_cast<double>(c.count);
    for (std::size_t k = 0; k < 10; ++k)
        c.center[k] = (n * c.center[k] + point[k]) / (n + 1.0);
    c.count += 1;
    if (amplify) c.sigma *= 1.0 + cfg.beta;
    return {false, c.id};
}

void SlowBuffer::apply_forgetting(const ReplayConfig& cfg) {
    if (clusters_.empty()) return;
    const double total = static_cast<double>(total_count());
    for (Cluster& c : clusters_) {
        const double share = static_cast<double>(c.count) / total;
        c.sigma *= cfg.sigma0 * (1.0 / cfg.rho) * (1.0 - share);
    }
}

std::vector<long> SlowBuffer::prune_narrow(const ReplayConfig& cfg) {
    std::vector<long> removed;
    auto it = clusters_.begin();
    while (it != clusters_.end()) {
        if (it->sigma <= cfg.sigma_th) {
            removed.push_back(it->id);
            pruned_mass_ += it->count;
            it = clusters_.erase(it);
        } else {
            ++it;
        }
    }
    return removed;
}

std::vector<MergeEvent> SlowBuffer::merge_similar(const ReplayConfig& cfg) {
    std::vector<MergeEvent> events;
    for (;;) {
        double best_d2 = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0, best_j = 0;
        bool found = false;
        for (std::size_t i = 0; i < clusters_.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters_.size(); ++j) {
                const double limit =
                    cfg.gamma_merge * std::max(clusters_[i].sigma, clusters_[j].sigma);
                const double d2 = squared_distance(clusters_[i].center, clusters_[j].center);
                if (d2 >= limit * limit) continue;
                const bool closer = d2 < best_d2;
                const bool tie_break =
                    d2 == best_d2 &&
                    std::minmax(clusters_[i].id, clusters_[j].id) <
                        std::minmax(clusters_[best_i].id, clusters_[best_j].id);
                if (closer || tie_break) {
                    best_d2 = d2;
                    best_i = i;
                    best_j = j;
                    found = true;
                }
            }
        }
        if (!found) break;

        // keep the smaller id; fold the other in
        std::size_t keep = best_i, drop = best_j;
        if (clusters_[drop].id < clusters_[keep].id) std::swap(keep, drop);
        Cluster& a = clusters_[keep];
        const Cluster& b = clusters_[drop];
        const double na = static_cast<double>(a.count);
        const double nb = static_cast<double>(b.count);
        for (std::size_t k = 0; k < 10; ++k)
            a.center[k] = (na * a.center[k] + nb * b.center[k]) / (na + nb);
        a.count += b.count;
        a.sigma = std::max(a.sigma, b.sigma);
        events.push_back({a.id, b.id});
        clusters_.erase(clusters_.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    return events;
}

long SlowBuffer::total_count() const {
    long n = 0;
    for (const Cluster& c : clusters_) n += c.count;
    return n;
}

namespace {

Sample synthesize(const Cluster& c, const Vec5& kappa, Rng* rng) {
    Vec10 point = c.center;
    if (rng != nullptr)
        for (std::size_t k = 0; k < 10; ++k) point[k] += c.sigma * rng->normal();
    Sample s;
    for (std::size_t k = 0; k < 5; ++k) {
        s.x[k] = clamp01(point[k]);
        s.u[k] = std::clamp(point[5 + k], 0.0, kappa[k]);
    }
    s.t = 0.0;
    s.run_id = -1;  // marks synthetic cluster-derived samples
    return s;
}

}  // namespace

std::vector<Sample> make_minibatch(const FastBuffer& fast, const SlowBuffer& slow,
                                   const ReplayConfig& cfg, const Vec5& kappa, Rng& rng) {
    if (fast.empty() && slow.empty())
        throw EmptyReplay("make_minibatch: both buffers are empty");

    std::vector<Sample> batch;
    batch.reserve(fast.size() + slow.size() + static_cast<std::size_t>(cfg.batch_extra));
    for (const Sample& s : fast.samples()) batch.push_back(s);
    for (const Cluster& c : slow.clusters()) batch.push_back(synthesize(c, kappa, nullptr));

    if (!slow.empty() && cfg.batch_extra > 0) {
        const double total = static_cast<double>(slow.total_count());
        for (int draw = 0; draw < cfg.batch_extra; ++draw) {
            // size-weighted cluster choice via one uniform draw
            const double pick = rng.uniform01() * total;
            double acc = 0.0;
            const Cluster* chosen = &slow.clusters().back();
            for (const Cluster& c : slow.clusters()) {
                acc += static_cast<double>(c.count);
                if (pick < acc) {
                    chosen = &c;
                    break;
                }
            }
            batch.push_back(synthesize(*chosen, kappa, &rng));
        }
    }
    return batch;
}

void RerBuffer::push(const Sample& s) {
    samples_.push_back(s);
    while (samples_.size() > static_cast<std::size_t>(capacity_)) samples_.pop_front();
}

std::vector<Sample> RerBuffer::sample(std::size_t k, Rng& rng) const {
    if (samples_.empty()) throw EmptyReplay("RerBuffer::sample: buffer is empty");
    std::vector<Sample> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(samples_[rng.index(samples_.size())]);
    return out;
}

}  // namespace sodacer
