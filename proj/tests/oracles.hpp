#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they check: the ODE right-hand side is transcribed directly from the
// model equations rather than composed from drift + control matrix, the
// integrator is plain forward Euler, and the buffer/optimizer oracles are
// straight-line re-implementations.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "sodacer/dynamics.hpp"
#include "sodacer/replay.hpp"

namespace oracles {

using sodacer::HpvParameters;
using sodacer::ReplayConfig;
using sodacer::Vec5;
using Vec6 = std::array<double, 6>;
using Vec10 = std::array<double, 10>;

// Direct transcription of the six model ODEs.
inline Vec6 model_rhs(const Vec6& y, const Vec5& u, const HpvParameters& p) {
    const double uf = y[0], iff = y[1], vf = y[2], im = y[3], vm = y[4];
    const double w1 = u[0], w2 = u[1], u1 = u[2], u2 = u[3], alpha = u[4];
    Vec6 d;
    d[0] = ((1.0 - uf - iff - vf) + p.epsilon * vf) * (1.0 - p.p) * p.beta_m * im -
           (p.gamma_f + alpha + p.mu_f) * uf;
    d[1] = ((1.0 - uf - iff - vf) + p.epsilon * vf) * p.p * p.beta_m * im + alpha * uf -
           (p.gamma_f + p.mu_f) * iff;
    d[2] = w1 * p.mu_f + u1 * (1.0 - uf - iff - vf) - p.epsilon * p.beta_m * vf * im -
           (p.mu_f + p.theta) * vf;
    d[3] = (p.beta_f * uf + p.beta_f_tilde * iff) * ((1.0 - im - vm) + p.epsilon * vm) -
           (p.gamma_m + p.mu_m) * im;
    d[4] = w2 * p.mu_m - (p.beta_f * uf + p.beta_f_tilde * iff) * p.epsilon * vm +
           u2 * (1.0 - im - vm) - (p.mu_m + p.theta) * vm;
    d[5] = 0.5 * (p.a1_over_a0 * (w1 * w1 + w2 * w2) + p.a2_over_a0 * (u1 * u1 + u2 * u2) +
                  p.a3_over_a0 * alpha * alpha);
    return d;
}

// Forward-Euler rollout under constant controls, sampled every dt_record.
inline std::vector<Vec6> euler_rollout(const Vec6& x0, const Vec5& u, const HpvParameters& p,
                                       double horizon, double dt_fine, double dt_record) {
    const long per_record = std::lround(dt_record / dt_fine);
    const long n_records = std::lround(horizon / dt_record);
    std::vector<Vec6> out;
    out.reserve(static_cast<std::size_t>(n_records) + 1);
    Vec6 y = x0;
    out.push_back(y);
    for (long r = 0; r < n_records; ++r) {
        for (long s = 0; s < per_record; ++s) {
            const Vec6 d = model_rhs(y, u, p);
            for (int i = 0; i < 6; ++i) y[i] += dt_fine * d[i];
        }
        out.push_back(y);
    }
    return out;
}

inline double adaptive_simpson_impl(const std::function<double(double)>& f, double a, double b,
                                    double fa, double fm, double fb, double whole, double eps,
                                    int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_impl(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           adaptive_simpson_impl(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double eps = 1e-12, int depth = 40) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_impl(f, a, b, fa, fm, fb, whole, eps, depth);
}

// Recompute-everything re-implementation of the clustered buffer heuristics.
struct NaiveCluster {
    Vec10 center{};
    double sigma = 0.0;
    long count = 0;
    long id = 0;
};

struct NaiveSlowBuffer {
    std::vector<NaiveCluster> clusters;
    long next_id = 0;
    long pruned = 0;

    static double mu(const Vec10& s, const NaiveCluster& c) {
        double d2 = 0.0;
        for (int i = 0; i < 10; ++i) d2 += (s[i] - c.center[i]) * (s[i] - c.center[i]);
        return std::exp(-d2 / (2.0 * c.sigma * c.sigma));
    }

    void absorb(const Vec10& s, const ReplayConfig& cfg, bool amplify) {
        double best = -1.0;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            const double m = mu(s, clusters[i]);
            if (m > best) {
                best = m;
                best_i = i;
            }
        }
        if (best <= cfg.gamma_th) {
            clusters.push_back({s, cfg.sigma0, 1, next_id++});
            return;
        }
        NaiveCluster& c = clusters[best_i];
        for (int i = 0; i < 10; ++i)
            c.center[i] = (static_cast<double>(c.count) * c.center[i] + s[i]) /
                          (static_cast<double>(c.count) + 1.0);
        c.count += 1;
        if (amplify) c.sigma *= 1.0 + cfg.beta;
    }

    void forget(const ReplayConfig& cfg) {
        double total = 0.0;
        for (const NaiveCluster& c : clusters) total += static_cast<double>(c.count);
        for (NaiveCluster& c : clusters)
            c.sigma *= cfg.sigma0 * (1.0 / cfg.rho) * (1.0 - static_cast<double>(c.count) / total);
    }

    void prune(const ReplayConfig& cfg) {
        std::vector<NaiveCluster> keep;
        for (const NaiveCluster& c : clusters) {
            if (c.sigma <= cfg.sigma_th)
                pruned += c.count;
            else
                keep.push_back(c);
        }
        clusters = keep;
    }

    void merge(const ReplayConfig& cfg) {
        for (;;) {
            double best_d2 = 1e300;
            std::size_t bi = 0, bj = 0;
            bool found = false;
            for (std::size_t i = 0; i < clusters.size(); ++i)
                for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                    double d2 = 0.0;
                    for (int k = 0; k < 10; ++k) {
                        const double d = clusters[i].center[k] - clusters[j].center[k];
                        d2 += d * d;
                    }
                    const double lim =
                        cfg.gamma_merge * std::max(clusters[i].sigma, clusters[j].sigma);
                    if (d2 >= lim * lim) continue;
                    auto ids = [&](std::size_t a, std::size_t b) {
                        return std::minmax(clusters[a].id, clusters[b].id);
                    };
                    if (d2 < best_d2 || (d2 == best_d2 && ids(i, j) < ids(bi, bj))) {
                        best_d2 = d2;
                        bi = i;
                        bj = j;
                        found = true;
                    }
                }
            if (!found) break;
            std::size_t keep = bi, drop = bj;
            if (clusters[drop].id < clusters[keep].id) std::swap(keep, drop);
            NaiveCluster& a = clusters[keep];
            const NaiveCluster& b = clusters[drop];
            const double na = static_cast<double>(a.count), nb = static_cast<double>(b.count);
            for (int k = 0; k < 10; ++k)
                a.center[k] = (na * a.center[k] + nb * b.center[k]) / (na + nb);
            a.count += b.count;
            a.sigma = std::max(a.sigma, b.sigma);
            clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(drop));
        }
    }
};

// Straight-line transcription of the moment recurrences.
template <std::size_t N>
std::array<double, N> moment_recurrence_oracle(std::array<double, N> w,
                                               const std::vector<std::array<double, N>>& grads,
                                               double beta1, double beta2, double eta,
                                               double eps0) {
    std::array<double, N> m{}, v{};
    for (std::size_t t = 1; t <= grads.size(); ++t) {
        const auto& g = grads[t - 1];
        for (std::size_t k = 0; k < N; ++k) {
            m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
            v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
            const double mh = m[k] / (1.0 - std::pow(beta1, static_cast<double>(t)));
            const double vh = v[k] / (1.0 - std::pow(beta2, static_cast<double>(t)));
            w[k] -= eta * mh / (std::sqrt(vh) + eps0);
        }
    }
    return w;
}

}  // namespace oracles
