#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace loadcast {

/// Name of the generator recorded in result metadata.
inline constexpr const char* kRngName = "mt19937_64/box-muller";

inline std::uint64_t splitmix64(std::uint64_t x) {
	x += 0x9e3779b97f4a7c15ULL;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
	return x ^ (x >> 31);
}

/// Combine a master seed with stream indices into an independent child seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
	return splitmix64(splitmix64(master ^ 0x6c62272e07bb0142ULL) + splitmix64(a) * 3 + b);
}

/// Seeded random source with explicit sampling algorithms.
///
/// std::normal_distribution and std::shuffle are implementation defined, so
/// every draw here is spelled out to make sequences identical across
/// standard libraries.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : engine_(seed) {}

	std::uint64_t next_u64() { return engine_(); }

	/// Uniform double in [0, 1) with 53 random bits.
	double uniform() {
		return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
	}

	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

	/// Uniform integer in [0, n). Modulo bias is irrelevant at our n << 2^64.
	std::size_t uniform_index(std::size_t n) {
		return static_cast<std::size_t>(engine_() % n);
	}

	/// Standard normal via Box-Muller. One spare value is cached.
	double normal() {
		if (has_spare_) {
			has_spare_ = false;
			return spare_;
		}
		double u1 = uniform();
		double u2 = uniform();
		while (u1 <= 0.0) u1 = uniform();
		const double radius = std::sqrt(-2.0 * std::log(u1));
		const double angle = 2.0 * M_PI * u2;
		spare_ = radius * std::sin(angle);
		has_spare_ = true;
		return radius * std::cos(angle);
	}

	double normal(double mean, double stddev) { return mean + stddev * normal(); }

	/// Fisher-Yates shuffle with this generator.
	template <typename T>
	void shuffle(std::vector<T>& items) {
		for (std::size_t i = items.size(); i > 1; --i) {
			std::swap(items[i - 1], items[uniform_index(i)]);
		}
	}

private:
	std::mt19937_64 engine_;
	double spare_ = 0.0;
	bool has_spare_ = false;
};

} // namespace loadcast
