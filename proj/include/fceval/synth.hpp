#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fceval/core.hpp"

namespace fceval::synth {

enum class DgpKind {
    RandomWalk,
    Ar,
    LinearTrend,
    ExponentialTrend,
    Seasonal,
    Heteroscedastic,
    StructuralBreak,
    Intermittent,
    Composite,
};
[[nodiscard]] std::string to_string(DgpKind k);
[[nodiscard]] std::optional<DgpKind> parse_kind(const std::string& text);

enum class Noise { Gaussian, StudentT };

struct DgpSpec {
    DgpKind kind = DgpKind::RandomWalk;
    std::size_t length = 100;
    double noise_sd = 1.0;
    Noise noise = Noise::Gaussian;
    double t_df = 5.0;
    std::uint64_t seed = 0;
    std::string id = "synthetic";

    double level = 0.0;
    std::vector<double> ar;      // phi_1..phi_p
    bool unit_root = false;      // permits a non-stationary AR polynomial
    std::size_t burn_in = 200;   // discarded AR warm-up draws
    double slope = 0.0;          // linear trend per step
    double rate = 0.0;           // exponential growth per step
    double scale = 1.0;          // exponential trend value at t = 0
    std::size_t period = 12;
    double amplitude = 1.0;
    double sd_growth = 2.0;      // heteroscedastic: sd grows to (1 + sd_growth) * noise_sd
    std::size_t break_index = 0; // 1-based first position of the new regime
    double shift = 0.0;
    double zero_probability = 0.5;
    double demand_rate = 3.0;    // Poisson demand, plus one
    std::vector<DgpSpec> components;

    /// Throws ConfigError on an invalid spec.
    void validate() const;
};

/// True when all roots of 1 - phi_1 z - ... - phi_p z^p lie outside the unit
/// circle (reflection coefficients all below one in magnitude).
bool ar_stationary(const std::vector<double>& phi);

core::TimeSeries generate(const DgpSpec& spec);

enum class Direction { High, Low, Both };
enum class MagnitudeMode { Multiply, Add };

struct OutlierInjection {
    std::vector<std::size_t> indices;  // 0-based positions
    std::optional<double> rate;        // alternative to indices: fraction of positions
    double magnitude = 10.0;
    MagnitudeMode mode = MagnitudeMode::Multiply;
    Direction direction = Direction::High;
};

struct InjectionRecord {
    std::size_t index = 0;
    double before = 0.0;
    double after = 0.0;
};

struct Injected {
    core::TimeSeries series;
    std::vector<InjectionRecord> log;
};

Injected inject_outliers(const core::TimeSeries& series, const OutlierInjection& spec, std::uint64_t seed);

std::string series_to_csv(const core::TimeSeries& series, bool header = true);

}  // namespace fceval::synth
