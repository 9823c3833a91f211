#ifndef VHSIM_RNG_HPP
#define VHSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace vhsim {

// Single seeded generator per scenario; every stochastic draw consumes from
// it in deterministic order. The mappings below are fixed here rather than
// taken from <random> distributions so that traces are reproducible across
// standard libraries.
class SimRng {
public:
    explicit SimRng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01()
    {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    double exponential(double mean)
    {
        return -mean * std::log1p(-uniform01());
    }

    // True with probability p; p <= 0 never draws true, p >= 1 always does.
    bool chance(double p) { return uniform01() < p; }

    std::uint64_t integer(std::uint64_t bound) // in [0, bound)
    {
        return bound ? gen_() % bound : 0;
    }

private:
    std::mt19937_64 gen_;
};

// Descriptor for a scenario-configurable random quantity.
//   const A        -> always A
//   uniform A B    -> uniform in [A, B)
//   exp A          -> exponential with mean A
//   config_ratio R -> R times the paired configuration draw (handover rule
//                     installation only)
struct Distribution {
    enum class Kind { Constant, Uniform, Exponential, ConfigRatio };

    Kind kind = Kind::Constant;
    double a = 0.0;
    double b = 0.0;

    static Distribution constant(double v) { return {Kind::Constant, v, 0.0}; }
    static Distribution uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
    static Distribution exponential(double mean) { return {Kind::Exponential, mean, 0.0}; }
    static Distribution config_ratio(double r) { return {Kind::ConfigRatio, r, 0.0}; }

    double sample(SimRng& rng) const
    {
        switch (kind) {
        case Kind::Constant: return a;
        case Kind::Uniform: return rng.uniform(a, b);
        case Kind::Exponential: return rng.exponential(a);
        case Kind::ConfigRatio:
            throw std::logic_error("config_ratio cannot be sampled directly");
        }
        return a;
    }

    std::string to_string() const;
    static Distribution parse(const std::string& text); // throws std::invalid_argument

    friend bool operator==(const Distribution&, const Distribution&) = default;
};

} // namespace vhsim

#endif
