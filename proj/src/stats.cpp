#include "ebql/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ebql/errors.hpp"

namespace ebql {

double compensated_sum(std::span<const double> values) {
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

double empirical_mean(std::span<const double> values) {
    if (values.empty()) throw InvalidParameter("empirical_mean: empty sample list");
    return compensated_sum(values) / static_cast<double>(values.size());
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

namespace {

// Continued-fraction evaluation of the regularized incomplete beta.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 200;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_sf(double t, double df) {
    if (!(df > 0.0)) throw InvalidParameter("student_t_sf: df must be positive");
    const double x = df / (df + t * t);
    const double half_tail = 0.5 * reg_inc_beta(0.5 * df, 0.5, x);
    return t >= 0.0 ? half_tail : 1.0 - half_tail;
}

double Rng::gaussian(double mean, double std) {
    if (!(std >= 0.0)) throw InvalidParameter("gaussian: std must be positive");
    if (std == 0.0) throw InvalidParameter("gaussian: std must be positive");
    if (has_spare_) {
        has_spare_ = false;
        return mean + std * spare_;
    }
    // Box-Muller; u1 is kept away from 0 so the log is finite.
    double u1;
    do {
        u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586477 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return mean + std * (r * std::cos(theta));
}

std::vector<double> Rng::gaussians(double mean, double std, std::size_t n) {
    std::vector<double> out(n);
    for (auto& v : out) v = gaussian(mean, std);
    return out;
}

SampleSet::SampleSet(std::vector<std::vector<double>> per_arm)
    : samples_(std::move(per_arm)) {
    if (samples_.empty()) throw InvalidParameter("SampleSet: need at least one arm");
    n_ = samples_.front().size();
    if (n_ == 0) throw InvalidParameter("SampleSet: arms must be nonempty");
    for (const auto& arm : samples_) {
        if (arm.size() != n_)
            throw InvalidParameter("SampleSet: all arms must hold the same sample count");
        for (double v : arm)
            if (!std::isfinite(v)) throw InvalidParameter("SampleSet: samples must be finite");
    }
}

Partition::Partition(std::vector<std::vector<std::size_t>> subsets, std::size_t n)
    : subsets_(std::move(subsets)), n_(n) {
    if (subsets_.size() < 2) throw InvalidParameter("Partition: K must be >= 2");
    if (n_ % subsets_.size() != 0)
        throw InvalidPartition("Partition: K must divide N");
    const std::size_t each = n_ / subsets_.size();
    std::vector<bool> seen(n_, false);
    for (const auto& s : subsets_) {
        if (s.size() != each)
            throw InvalidPartition("Partition: subsets must have equal size N/K");
        for (std::size_t idx : s) {
            if (idx >= n_ || seen[idx])
                throw InvalidPartition("Partition: subsets must be disjoint and within [0, N)");
            seen[idx] = true;
        }
    }
}

Partition partition_samples(std::size_t n, std::size_t k, Rng& rng) {
    if (k < 2) throw InvalidParameter("partition_samples: K must be >= 2");
    if (n == 0 || n % k != 0)
        throw InvalidPartition("partition_samples: K must divide N");
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    // Fisher-Yates driven by the provided stream.
    for (std::size_t i = n - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng.uniform_below(i + 1));
        std::swap(perm[i], perm[j]);
    }
    const std::size_t each = n / k;
    std::vector<std::vector<std::size_t>> subsets(k);
    for (std::size_t s = 0; s < k; ++s)
        subsets[s].assign(perm.begin() + static_cast<std::ptrdiff_t>(s * each),
                          perm.begin() + static_cast<std::ptrdiff_t>((s + 1) * each));
    return Partition(std::move(subsets), n);
}

SampleSet sample_gaussian_set(Rng& rng, std::span<const double> means,
                              std::span<const double> stds, std::size_t n) {
    if (means.size() != stds.size())
        throw InvalidParameter("sample_gaussian_set: means/stds length mismatch");
    std::vector<std::vector<double>> arms(means.size());
    for (std::size_t a = 0; a < means.size(); ++a)
        arms[a] = rng.gaussians(means[a], stds[a], n);
    return SampleSet(std::move(arms));
}

}  // namespace ebql
