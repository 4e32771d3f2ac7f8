#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kbarrier/geometry.hpp"

namespace kbarrier::deployment {

/// Circular region of interest.
struct RegionSpec {
    double radius_m = 40.0;
    Point center{};

    double area() const { return kPi * radius_m * radius_m; }
    void validate() const;
};

enum class Distribution { gaussian, uniform };

std::string to_string(Distribution d);
Distribution distribution_from_string(const std::string& name);

struct DeploymentSpec {
    RegionSpec region{};
    int n_sensors = 100;
    Distribution distribution = Distribution::uniform;
    // Gaussian only. Non-positive means "use radius / 3".
    double sigma_x = 0.0;
    double sigma_y = 0.0;
    std::uint64_t seed = 0;
    // Rejection-sampling attempt cap for the whole field (Gaussian only).
    std::uint64_t max_attempts = 1'000'000;

    double effective_sigma_x() const { return sigma_x > 0.0 ? sigma_x : region.radius_m / 3.0; }
    double effective_sigma_y() const { return sigma_y > 0.0 ? sigma_y : region.radius_m / 3.0; }
    void validate() const;
};

/// A realized deployment. Immutable once built by `make_field`.
struct SensorField {
    std::vector<Point> positions;
    double sensing_range_m = 15.0;
    double tx_range_m = 30.0;
    RegionSpec region{};

    std::size_t size() const { return positions.size(); }
};

/// N i.i.d. points with density 1/(pi R^2): radius R*sqrt(u), angle 2*pi*v.
std::vector<Point> sample_uniform(const DeploymentSpec& spec);

/// Bivariate normal around the region center, rejection-resampled into the
/// disk. Throws SamplingError when `max_attempts` is exhausted.
std::vector<Point> sample_gaussian(const DeploymentSpec& spec);

/// Dispatches on `spec.distribution`.
std::vector<Point> sample(const DeploymentSpec& spec);

/// Attaches ranges to sampled positions. Enforces tx >= 2 * sensing.
SensorField make_field(const DeploymentSpec& spec, double sensing_range_m, double tx_range_m);

/// `x,y` header, six decimals.
void write_csv(std::ostream& out, const SensorField& field);

}  // namespace kbarrier::deployment
