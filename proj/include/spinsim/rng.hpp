#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace spinsim {

// Counter-style deterministic RNG. Every consumer derives its own stream from
// (root seed, purpose, indices...), so parallel and serial execution produce
// identical results and draws never depend on evaluation order.
enum class RngStream : std::uint64_t {
    noise = 1,
    rb_sequence = 2,
    readout = 3,
    mc_resample = 4,
    tomo = 5,
    spam = 6,
    ou_path = 7,
    bayes = 8,
    misc = 9,
};

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed ^ 0x6a09e667f3bcc909ull)) {}

    static Rng stream(std::uint64_t root, RngStream purpose,
                      std::initializer_list<std::uint64_t> path = {}) {
        std::uint64_t s = mix(root ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(purpose)));
        for (std::uint64_t p : path) s = mix(s ^ (p + 0xbf58476d1ce4e5b9ull));
        return Rng(s);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    double uniform() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double gauss() {  // Box-Muller, two uniforms per call
        double u1 = uniform(), u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTau * u2);
    }

    std::uint64_t uniform_int(std::uint64_t n) {  // [0, n)
        // Lemire-style rejection-free enough for n << 2^64
        return next_u64() % n;
    }

    // Single categorical draw from an unnormalized non-negative weight vector.
    int categorical(const double* w, int n) {
        double total = 0;
        for (int i = 0; i < n; ++i) total += w[i];
        double u = uniform() * total;
        double acc = 0;
        for (int i = 0; i < n - 1; ++i) {
            acc += w[i];
            if (u < acc) return i;
        }
        return n - 1;
    }

    // Binomial(n, p) by inverse-CDF walk; complements p > 1/2 to bound work.
    long binomial(long n, double p) {
        if (n <= 0) return 0;
        if (p <= 0) return 0;
        if (p >= 1) return n;
        if (p > 0.5) return n - binomial(n, 1.0 - p);
        if (n <= 32) {
            long k = 0;
            for (long i = 0; i < n; ++i) k += (uniform() < p) ? 1 : 0;
            return k;
        }
        const double q = 1.0 - p, r = p / q;
        double pk = std::pow(q, double(n));  // P(X=0)
        if (pk <= 0) {                       // extreme underflow: normal fallback
            double m = n * p, sd = std::sqrt(n * p * q);
            double x = std::floor(m + sd * gauss() + 0.5);
            if (x < 0) x = 0;
            if (x > double(n)) x = double(n);
            return static_cast<long>(x);
        }
        double u = uniform(), cdf = pk;
        long k = 0;
        while (u > cdf && k < n) {
            ++k;
            pk *= r * double(n - k + 1) / double(k);
            cdf += pk;
        }
        return k;
    }

    // Multinomial counts over 4 cells.
    std::array<long, 4> multinomial4(long shots, const std::array<double, 4>& p) {
        std::array<long, 4> counts{0, 0, 0, 0};
        double rest = p[0] + p[1] + p[2] + p[3];
        long left = shots;
        for (int i = 0; i < 3 && left > 0; ++i) {
            double pi = rest > 0 ? p[i] / rest : 0.0;
            counts[i] = binomial(left, pi);
            left -= counts[i];
            rest -= p[i];
        }
        counts[3] = left;
        return counts;
    }

  private:
    static constexpr double kTau = 6.283185307179586476925;
    static std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
};

}  // namespace spinsim
