#ifndef VOLCUT_COMMON_HPP
#define VOLCUT_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace volcut {

// Label value marking an element assigned to no model.
inline constexpr int kOutlier = -1;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Errc {
    EmptySegment,
    EmptyInlierSet,
    DegenerateFit,
    NegativeCapacity,
    NotSubmodular,
    NotBinary,
    BadInput,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::EmptySegment: return "EmptySegment";
        case Errc::EmptyInlierSet: return "EmptyInlierSet";
        case Errc::DegenerateFit: return "DegenerateFit";
        case Errc::NegativeCapacity: return "NegativeCapacity";
        case Errc::NotSubmodular: return "NotSubmodular";
        case Errc::NotBinary: return "NotBinary";
        case Errc::BadInput: return "BadInput";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

// x * ln(x) with the 0 * ln 0 == 0 convention.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Deterministic RNG with explicit samplers so that seeded runs are
// reproducible independently of the standard library's distributions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    int uniform_int(int n) { return int(next_u64() % std::uint64_t(n)); }

    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

  private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace volcut

#endif  // VOLCUT_COMMON_HPP
