#include "kbarrier/deployment.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "kbarrier/error.hpp"
#include "kbarrier/rng.hpp"

namespace kbarrier::deployment {

void RegionSpec::validate() const {
    if (!(radius_m > 0.0) || !std::isfinite(radius_m))
        throw ValidationError("region radius must be positive, got " + std::to_string(radius_m));
}

std::string to_string(Distribution d) {
    return d == Distribution::gaussian ? "gaussian" : "uniform";
}

Distribution distribution_from_string(const std::string& name) {
    if (name == "gaussian" || name == "Gaussian") return Distribution::gaussian;
    if (name == "uniform" || name == "Uniform") return Distribution::uniform;
    throw ValidationError("unknown distribution '" + name + "' (expected gaussian|uniform)");
}

void DeploymentSpec::validate() const {
    region.validate();
    if (n_sensors < 1)
        throw ValidationError("n_sensors must be >= 1, got " + std::to_string(n_sensors));
    if (distribution == Distribution::gaussian) {
        if (sigma_x < 0.0 || sigma_y < 0.0 || !std::isfinite(sigma_x) || !std::isfinite(sigma_y))
            throw ValidationError("sigma_x and sigma_y must be positive");
    }
}

std::vector<Point> sample_uniform(const DeploymentSpec& spec) {
    spec.validate();
    rng::Engine eng(spec.seed);
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(spec.n_sensors));
    const double R = spec.region.radius_m;
    for (int i = 0; i < spec.n_sensors; ++i) {
        const double gamma = R * std::sqrt(rng::uniform01(eng));
        const double phi = 2.0 * kPi * rng::uniform01(eng);
        pts.push_back({spec.region.center.x + gamma * std::cos(phi),
                       spec.region.center.y + gamma * std::sin(phi)});
    }
    return pts;
}

std::vector<Point> sample_gaussian(const DeploymentSpec& spec) {
    spec.validate();
    rng::Engine eng(spec.seed);
    const double sx = spec.effective_sigma_x();
    const double sy = spec.effective_sigma_y();
    const double R = spec.region.radius_m;
    const Point c = spec.region.center;

    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(spec.n_sensors));
    std::uint64_t attempts = 0;
    while (static_cast<int>(pts.size()) < spec.n_sensors) {
        if (attempts >= spec.max_attempts) {
            std::ostringstream msg;
            msg << "gaussian rejection sampling exhausted " << attempts << " attempts with "
                << pts.size() << " of " << spec.n_sensors << " points accepted (acceptance rate "
                << static_cast<double>(pts.size()) / static_cast<double>(attempts)
                << "); sigma is too large for radius " << R;
            throw SamplingError(msg.str());
        }
        ++attempts;
        const Point z = rng::standard_normal_pair(eng);
        const Point p{c.x + sx * z.x, c.y + sy * z.y};
        if (distance(p, c) <= R) pts.push_back(p);
    }
    return pts;
}

std::vector<Point> sample(const DeploymentSpec& spec) {
    return spec.distribution == Distribution::gaussian ? sample_gaussian(spec)
                                                       : sample_uniform(spec);
}

SensorField make_field(const DeploymentSpec& spec, double sensing_range_m, double tx_range_m) {
    if (!(sensing_range_m > 0.0) || !(tx_range_m > 0.0))
        throw ValidationError("sensing and transmission ranges must be positive");
    if (tx_range_m < 2.0 * sensing_range_m)
        throw ValidationError("transmission range " + std::to_string(tx_range_m) +
                              " is below twice the sensing range " +
                              std::to_string(sensing_range_m));
    SensorField field;
    field.positions = sample(spec);
    field.sensing_range_m = sensing_range_m;
    field.tx_range_m = tx_range_m;
    field.region = spec.region;
    return field;
}

void write_csv(std::ostream& out, const SensorField& field) {
    out << "x,y\n" << std::fixed << std::setprecision(6);
    for (const Point& p : field.positions) out << p.x << ',' << p.y << '\n';
}

}  // namespace kbarrier::deployment
