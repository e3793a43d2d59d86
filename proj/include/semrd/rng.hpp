/***************************************************************
 *  rng.hpp
 *
 *  Deterministic, splittable, counter-based random generator.
 *
 *  All randomness in the library flows from a single 64-bit
 *  seed.  Independent streams are obtained with split(), which
 *  derives a new key from (key, stream id); draws are produced
 *  by mixing key + counter, so a generator never mutates shared
 *  state and identical (seed, stream, counter) triples yield
 *  identical values on every platform.  std:: distributions are
 *  deliberately avoided: their output is implementation-defined
 *  and would break cross-platform reproducibility of seeded
 *  experiments.
 ***************************************************************/

#ifndef SEMRD_RNG_HPP
#define SEMRD_RNG_HPP

#include <cstdint>
#include <vector>

namespace semrd {

class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(mix(seed) ^ mix(stream + 0x632be59bd9b4e019ULL))), counter_(0) {}

    /// Derive an independent stream; does not disturb this generator.
    Rng split(std::uint64_t stream) const { return Rng(key_, stream + 1); }

    std::uint64_t next_u64() {
        return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n); n must be > 0.  Unbiased (rejection).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t x;
        do { x = next_u64(); } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return next_double() < p; }

    /// Index drawn from a finite distribution given by weights summing to ~1.
    std::size_t categorical(const std::vector<double>& probs) {
        double u = next_double(), acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return probs.empty() ? 0 : probs.size() - 1;
    }

    /// k distinct indices from [0, n), in random order (partial Fisher-Yates).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        if (k > n) k = n;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(below(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace semrd

#endif // SEMRD_RNG_HPP
