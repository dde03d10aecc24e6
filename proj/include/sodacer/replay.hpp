#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "sodacer/linalg.hpp"
#include "sodacer/rng.hpp"

namespace sodacer {

// One stored experience: the state at which a control was computed and the
// control actually applied there.
struct Sample {
    Vec5 x{};
    Vec5 u{};
    double t = 0.0;
    int run_id = 0;

    Vec10 concat() const {
        return {x[0], x[1], x[2], x[3], x[4], u[0], u[1], u[2], u[3], u[4]};
    }
};

// Gaussian memory cell of the Slow-Buffer: centroid over (state || control),
// isotropic spread, and how many samples it has absorbed.
struct Cluster {
    Vec10 center{};
    double sigma = 0.0;
    long count = 0;
    long id = 0;  // creation-order id, used for deterministic tie-breaking
};

struct ReplayConfig {
    int fast_capacity = 32;
    double gamma_th = 0.5;       // membership threshold for joining a cluster
    double sigma0 = 0.02;        // spread of a freshly created cluster
    double beta = 0.05;          // spread amplification on absorption
    double rho = 0.02;           // forgetting scale; default equals sigma0
    double sigma_th = 0.005;     // clusters at or below this spread are pruned
    double gamma_merge = 0.32029141227185776;  // sqrt(-2 ln 0.95)
    int forget_every = 50;       // trainer steps between forgetting applications
    int batch_extra = 16;        // synthetic intra-cluster draws per mini-batch
    int max_clusters = 512;      // safety cap; exceeding it signals bad hyperparameters
    int rer_capacity = 512;      // ring size of the random-replay baseline
};

// Gaussian membership of a sample in a cluster, on the concatenated 10-vector.
double membership(const Sample& sample, const Cluster& cluster);

// FIFO of recent raw samples. Eviction is driven by the trainer, which
// migrates the oldest sample into the Slow-Buffer once capacity is reached.
class FastBuffer {
public:
    void push(const Sample& s) { samples_.push_back(s); }
    Sample pop_oldest();
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const std::deque<Sample>& samples() const { return samples_; }

private:
    std::deque<Sample> samples_;
};

struct AbsorbReport {
    bool created_new = false;
    long cluster_id = -1;
};

struct MergeEvent {
    long kept_id = -1;
    long removed_id = -1;
};

// Self-organizing clustered long-term memory. Absorption either spawns a new
// cluster or folds the sample into the best-matching one; the spread
// lifecycle (amplification, forgetting, pruning, merging) keeps the set
// compact.
class SlowBuffer {
public:
    // Amplifies the joined cluster's spread by (1 + beta).
    AbsorbReport absorb(const Sample& s, const ReplayConfig& cfg);

    // Static-clustering baseline: identical placement rule, but the spread
    // stays at sigma0 forever and no lifecycle is expected to run.
    AbsorbReport cber_absorb(const Sample& s, const ReplayConfig& cfg);

    // sigma_k *= sigma0 * (1/rho) * (1 - N_k / sum N)
    void apply_forgetting(const ReplayConfig& cfg);

    // Removes clusters with sigma <= sigma_th; their counts are added to the
    // forgotten-mass tally so sample conservation stays checkable.
    std::vector<long> prune_narrow(const ReplayConfig& cfg);

    // Repeatedly merges the closest pair with ||c_i - c_j|| < gamma * max(sigma),
    // ties broken by ascending (id_i, id_j). Mass-weighted centers, spread of
    // the wider member.
    std::vector<MergeEvent> merge_similar(const ReplayConfig& cfg);

    const std::vector<Cluster>& clusters() const { return clusters_; }
    std::size_t size() const { return clusters_.size(); }
    bool empty() const { return clusters_.empty(); }
    long total_count() const;
    long pruned_mass() const { return pruned_mass_; }

private:
    AbsorbReport absorb_impl(const Sample& s, const ReplayConfig& cfg, bool amplify);

    std::vector<Cluster> clusters_;
    long next_id_ = 0;
    long pruned_mass_ = 0;
};

// Mini-batch assembly: the whole Fast-Buffer, every cluster center as a
// synthetic sample, plus batch_extra draws from size-weighted clusters
// (isotropic Gaussian at the stored spread, clamped to the valid box).
// kappa gives the upper control bounds for clamping. Throws EmptyReplay if
// both buffers are empty.
std::vector<Sample> make_minibatch(const FastBuffer& fast, const SlowBuffer& slow,
                                   const ReplayConfig& cfg, const Vec5& kappa, Rng& rng);

// Capacity-bounded FIFO ring with uniform with-replacement sampling; the
// random-replay baseline.
class RerBuffer {
public:
    explicit RerBuffer(int capacity) : capacity_(capacity) {}

    void push(const Sample& s);
    std::vector<Sample> sample(std::size_t k, Rng& rng) const;
    std::size_t size() const { return samples_.size(); }

private:
    std::deque<Sample> samples_;
    int capacity_;
};

}  // namespace sodacer
