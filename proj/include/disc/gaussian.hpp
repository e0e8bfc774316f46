#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "disc/bodies.hpp"
#include "disc/errors.hpp"
#include "disc/linalg.hpp"
#include "disc/rng.hpp"

namespace disc {

inline Vector sample_gaussian(int n, SeededRng& rng) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = rng.gaussian();
    return x;
}

/// Standard Gaussian on the subspace H: z = sum_i g_i u_i over an
/// orthonormal basis of H. Marginals along any unit vector of H are N(0,1).
inline Vector sample_gaussian_subspace(const Subspace& h, SeededRng& rng) {
    const int d = h.dim();
    Vector g(d);
    for (int i = 0; i < d; ++i) g(i) = rng.gaussian();
    return h.basis() * g;
}

/// Two-sided strip measure Phi(lambda) = P[|g| <= lambda] for g ~ N(0,1).
inline double strip_measure(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("strip_measure: lambda must be >= 0");
    return std::erf(lambda / std::numbers::sqrt2);
}

inline double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

/// Inverse of normal_cdf to ~1e-14, by bisection plus Newton polish.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normal_cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const double density = std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
        if (density < 1e-300) break;
        t -= (normal_cdf(t) - p) / density;
    }
    return t;
}

struct MeasureEstimate {
    double p_hat = 0.0;
    double std_err = 0.0;
    long long n_samples = 0;
    long long hits = 0;
};

inline MeasureEstimate make_estimate(long long hits, long long n_samples) {
    MeasureEstimate e;
    e.hits = hits;
    e.n_samples = n_samples;
    e.p_hat = n_samples > 0 ? static_cast<double>(hits) / static_cast<double>(n_samples) : 0.0;
    e.std_err = n_samples > 0 ? std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(n_samples))
                              : 0.0;
    return e;
}

namespace detail {

inline constexpr long long kShardSize = 1 << 14;

/// Runs `fn(shard_rng, block_samples) -> T` over fixed-size shards with
/// derived streams and sums the results. The shard decomposition (not the
/// thread count) defines the sample sequence, so the total is identical for
/// any number of threads.
template <typename T, typename BlockFn>
T sharded_reduce(long long n_samples, const SeededRng& rng, int n_threads, BlockFn&& fn) {
    const long long n_shards = (n_samples + kShardSize - 1) / kShardSize;
    auto run_range = [&](long long first, long long last) {
        T acc{};
        for (long long s = first; s < last; ++s) {
            SeededRng shard = rng.child(static_cast<std::uint64_t>(s));
            const long long count = std::min<long long>(kShardSize, n_samples - s * kShardSize);
            acc += fn(shard, count);
        }
        return acc;
    };
    if (n_threads <= 1 || n_shards <= 1) return run_range(0, n_shards);
    const int workers = static_cast<int>(std::min<long long>(n_threads, n_shards));
    std::vector<std::future<T>> futs;
    const long long per = (n_shards + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const long long first = w * per;
        const long long last = std::min(n_shards, first + per);
        if (first >= last) break;
        futs.push_back(std::async(std::launch::async, run_range, first, last));
    }
    T total{};
    for (auto& f : futs) total += f.get();
    return total;
}

}  // namespace detail

/// Monte-Carlo estimate of the Gaussian measure of the body. Shards of
/// 2^14 samples each own a derived stream; the total is independent of the
/// thread count.
inline MeasureEstimate estimate_measure(const ConvexBody& body, long long n_samples,
                                        const SeededRng& rng, int n_threads = 1) {
    if (n_samples < 1) throw std::invalid_argument("estimate_measure: n_samples must be >= 1");
    const int n = body.dim();
    const long long hits = detail::sharded_reduce<long long>(
        n_samples, rng, n_threads, [&](SeededRng& shard, long long count) {
            long long h = 0;
            Vector x(n);
            for (long long i = 0; i < count; ++i) {
                for (int j = 0; j < n; ++j) x(j) = shard.gaussian();
                if (body.contains(x)) ++h;
            }
            return h;
        });
    return make_estimate(hits, n_samples);
}

// ---------------------------------------------------------------------------
// Entropy bookkeeping
// ---------------------------------------------------------------------------

struct EntropyParams {
    double epsilon = 0.0;
    double delta = 0.0;  // (3/2) eps log2(1/eps)
    double h_eps = 0.0;  // binary entropy of eps
};

inline EntropyParams entropy_params(double eps) {
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::domain_error("entropy_params: epsilon must lie in (0, 1/2]");
    EntropyParams p;
    p.epsilon = eps;
    p.h_eps = eps * std::log2(1.0 / eps) + (1.0 - eps) * std::log2(1.0 / (1.0 - eps));
    p.delta = 1.5 * eps * std::log2(1.0 / eps);
    return p;
}

/// The subset-count bound behind the union bound: 2^{h(eps) n} <= e^{delta n},
/// i.e. h(eps) ln 2 <= delta. Exposed as the checkable margin.
inline double entropy_subset_margin(const EntropyParams& p) {
    return p.delta - p.h_eps * std::numbers::ln2;
}

enum class EntropyVariant { paper, lovett_meka };

struct EntropyCondition {
    bool holds = false;
    double sum = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound - sum
};

/// Largeness condition on normalized strip widths: sum exp(-l^2/2) <= n/1000,
/// or the Lovett-Meka form sum exp(-l^2/16) <= n/16.
inline EntropyCondition entropy_condition(const std::vector<double>& lambdas, int n,
                                          EntropyVariant variant = EntropyVariant::paper) {
    EntropyCondition c;
    const double denom = variant == EntropyVariant::paper ? 2.0 : 16.0;
    for (double l : lambdas) {
        if (!(l >= 0.0)) throw std::invalid_argument("entropy_condition: lambda must be >= 0");
        c.sum += std::exp(-l * l / denom);
    }
    c.bound = variant == EntropyVariant::paper ? n / 1000.0 : n / 16.0;
    c.margin = c.bound - c.sum;
    c.holds = c.sum <= c.bound;
    return c;
}

// ---------------------------------------------------------------------------
// Statistical lemma checks
// ---------------------------------------------------------------------------

/// Outcome of one Monte-Carlo inequality check. `estimate >= bound - 3 std_err`
/// is the pass rule everywhere; the inequalities themselves are theorems, so
/// a FAIL indicates a bug rather than bad luck (false-alarm rate ~1e-3).
struct CheckReport {
    std::string check;
    double estimate = 0.0;
    double bound = 0.0;
    double std_err = 0.0;
    bool pass = false;
    std::uint64_t seed = 0;
    long long n_samples = 0;
};

/// gamma(K n S) >= gamma(K) gamma(S) for symmetric K and a strip S, on
/// shared samples.
inline CheckReport check_sidak(const ConvexBody& K, const Strip& S, long long n_samples,
                               const SeededRng& rng, int n_threads = 1) {
    if (!K.symmetric()) throw std::invalid_argument("check_sidak: K must be symmetric");
    const int n = K.dim();
    struct Counts {
        long long k = 0, s = 0, ks = 0;
        Counts& operator+=(const Counts& o) {
            k += o.k;
            s += o.s;
            ks += o.ks;
            return *this;
        }
    };
    const Counts total = detail::sharded_reduce<Counts>(
        n_samples, rng, n_threads, [&](SeededRng& shard, long long count) {
            Counts c;
            Vector x(n);
            for (long long i = 0; i < count; ++i) {
                for (int j = 0; j < n; ++j) x(j) = shard.gaussian();
                const bool in_k = K.contains(x);
                const bool in_s = S.contains(x);
                if (in_k) ++c.k;
                if (in_s) ++c.s;
                if (in_k && in_s) ++c.ks;
            }
            return c;
        });
    const auto ek = make_estimate(total.k, n_samples);
    const auto es = make_estimate(total.s, n_samples);
    const auto eks = make_estimate(total.ks, n_samples);
    CheckReport r;
    r.check = "sidak";
    r.estimate = eks.p_hat - ek.p_hat * es.p_hat;
    r.bound = 0.0;
    r.std_err = std::sqrt(eks.std_err * eks.std_err +
                          ek.p_hat * ek.p_hat * es.std_err * es.std_err +
                          es.p_hat * es.p_hat * ek.std_err * ek.std_err);
    r.pass = r.estimate >= r.bound - 3.0 * r.std_err;
    r.seed = rng.seed();
    r.n_samples = n_samples;
    return r;
}

/// gamma(K_{3 sqrt(eps n)}) >= 1 - e^{-eps n} for any K with
/// gamma(K) >= e^{-eps n}. The body must expose distances through an exact
/// projection. The measure precondition is itself verified statistically.
inline CheckReport check_isoperimetry(const ConvexBody& K, double eps, long long n_samples,
                                      const SeededRng& rng, int n_threads = 1) {
    const int n = K.dim();
    if (!K.has_exact_project())
        throw std::invalid_argument("check_isoperimetry: K must provide exact projection");
    const double floor = std::exp(-eps * n);
    const auto base = estimate_measure(K, n_samples, rng, n_threads);
    if (base.p_hat < floor - 3.0 * base.std_err)
        throw PreconditionUnmet("check_isoperimetry: estimated gamma(K) = " +
                                std::to_string(base.p_hat) + " is below e^{-eps n} = " +
                                std::to_string(floor));
    const double enlargement = 3.0 * std::sqrt(eps * n);
    SeededRng fresh = rng.child(0x15017ull);
    const long long hits = detail::sharded_reduce<long long>(
        n_samples, fresh, n_threads, [&](SeededRng& shard, long long count) {
            long long h = 0;
            Vector x(n);
            for (long long i = 0; i < count; ++i) {
                for (int j = 0; j < n; ++j) x(j) = shard.gaussian();
                if ((x - K.project(x)).norm() <= enlargement) ++h;
            }
            return h;
        });
    const auto enlarged = make_estimate(hits, n_samples);
    CheckReport r;
    r.check = "isoperimetry";
    r.estimate = enlarged.p_hat;
    r.bound = 1.0 - floor;
    r.std_err = enlarged.std_err;
    r.pass = r.estimate >= r.bound - 3.0 * r.std_err;
    r.seed = rng.seed();
    r.n_samples = n_samples;
    return r;
}

/// gamma_H(K) >= gamma_n(K) for symmetric K and a subspace H (log-concavity
/// of the Gaussian), checked on independent sample sets.
inline CheckReport check_subspace_logconcavity(const ConvexBody& K, const Subspace& H,
                                               long long n_samples, const SeededRng& rng) {
    if (!K.symmetric())
        throw std::invalid_argument("check_subspace_logconcavity: K must be symmetric");
    SeededRng sub = rng.child(1);
    long long hits_h = 0;
    for (long long i = 0; i < n_samples; ++i) {
        if (K.contains(sample_gaussian_subspace(H, sub))) ++hits_h;
    }
    const auto eh = make_estimate(hits_h, n_samples);
    const auto en = estimate_measure(K, n_samples, rng.child(2));
    CheckReport r;
    r.check = "subspace_logconcavity";
    r.estimate = eh.p_hat;
    r.bound = en.p_hat;
    r.std_err = std::sqrt(eh.std_err * eh.std_err + en.std_err * en.std_err);
    r.pass = r.estimate >= r.bound - 3.0 * r.std_err;
    r.seed = rng.seed();
    r.n_samples = n_samples;
    return r;
}

}  // namespace disc
