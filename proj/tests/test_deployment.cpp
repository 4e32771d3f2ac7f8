#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kbarrier/deployment.hpp"
#include "kbarrier/error.hpp"

using namespace kbarrier;
using namespace kbarrier::deployment;

namespace {

DeploymentSpec spec_for(Distribution d, double radius, int n, std::uint64_t seed) {
    DeploymentSpec s;
    s.region.radius_m = radius;
    s.distribution = d;
    s.n_sensors = n;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("region area is pi R^2") {
    RegionSpec r;
    r.radius_m = 40.0;
    CHECK(r.area() == doctest::Approx(5026.548245743669));
    CHECK(1.0 / r.area() == doctest::Approx(1.989e-4).epsilon(1e-3));
}

TEST_CASE("invalid specs are rejected") {
    auto s = spec_for(Distribution::uniform, 40.0, 0, 1);
    CHECK_THROWS_AS(sample(s), ValidationError);
    s.n_sensors = 10;
    s.region.radius_m = 0.0;
    CHECK_THROWS_AS(sample(s), ValidationError);
    s.region.radius_m = 40.0;
    CHECK_THROWS_AS(make_field(s, 15.0, 29.0), ValidationError);
}

TEST_CASE("single point lies in the disk") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        for (auto d : {Distribution::uniform, Distribution::gaussian}) {
            const auto p = sample(spec_for(d, 40.0, 1, seed));
            REQUIRE(p.size() == 1);
            CHECK(norm(p[0]) <= 40.0);
        }
    }
}

TEST_CASE("support and determinism") {
    for (auto d : {Distribution::uniform, Distribution::gaussian}) {
        auto s = spec_for(d, 60.0, 5000, 42);
        s.region.center = {3.0, -7.0};
        const auto a = sample(s);
        const auto b = sample(s);
        CHECK(a == b);
        for (const Point& p : a) CHECK(distance(p, s.region.center) <= 60.0);
        s.seed = 43;
        CHECK(sample(s) != a);
    }
}

TEST_CASE("uniform sampler is area-correct") {
    const auto p = sample(spec_for(Distribution::uniform, 100.0, 100000, 1));
    const auto inner = std::count_if(p.begin(), p.end(), [](Point q) { return norm(q) <= 50.0; });
    CHECK(std::abs(static_cast<double>(inner) / 1e5 - 0.25) < 0.01);
}

TEST_CASE("gaussian sample mean is at the center") {
    const auto p = sample(spec_for(Distribution::gaussian, 60.0, 100000, 1));
    double mx = 0.0, my = 0.0;
    for (Point q : p) {
        mx += q.x;
        my += q.y;
    }
    CHECK(std::abs(mx / 1e5) < 1.0);
    CHECK(std::abs(my / 1e5) < 1.0);
}

TEST_CASE("near-flat gaussian approaches the uniform radial CDF") {
    // 100 fields of 1000 points keep each field under the rejection cap.
    std::vector<double> gauss, unif;
    for (std::uint64_t f = 0; f < 100; ++f) {
        auto g = spec_for(Distribution::gaussian, 10.0, 1000, f);
        g.sigma_x = g.sigma_y = 100.0;
        for (Point q : sample(g)) gauss.push_back(norm(q));
        for (Point q : sample(spec_for(Distribution::uniform, 10.0, 1000, 1000 + f))) unif.push_back(norm(q));
    }
    std::sort(gauss.begin(), gauss.end());
    // Against the analytic uniform-disk CDF (r/R)^2 and against the sampler.
    double sup_analytic = 0.0;
    for (std::size_t i = 0; i < gauss.size(); ++i) {
        const double cdf = (gauss[i] / 10.0) * (gauss[i] / 10.0);
        const double lo = static_cast<double>(i) / gauss.size();
        const double hi = static_cast<double>(i + 1) / gauss.size();
        sup_analytic = std::max({sup_analytic, std::abs(cdf - lo), std::abs(cdf - hi)});
    }
    CHECK(sup_analytic < 0.02);
    std::sort(unif.begin(), unif.end());
    double sup_sampler = 0.0;
    for (double r = 0.0; r <= 10.0; r += 0.05) {
        const double fg = static_cast<double>(std::upper_bound(gauss.begin(), gauss.end(), r) - gauss.begin());
        const double fu = static_cast<double>(std::upper_bound(unif.begin(), unif.end(), r) - unif.begin());
        sup_sampler = std::max(sup_sampler, std::abs(fg - fu) / 1e5);
    }
    CHECK(sup_sampler < 0.02);
}

TEST_CASE("rejection cap raises a sampling error naming the acceptance rate") {
    auto s = spec_for(Distribution::gaussian, 1.0, 100, 1);
    s.sigma_x = s.sigma_y = 1e4;
    s.max_attempts = 10000;
    try {
        (void)sample(s);
        FAIL("expected SamplingError");
    } catch (const SamplingError& e) {
        CHECK(std::string(e.what()).find("acceptance") != std::string::npos);
    }
}

TEST_CASE("field CSV") {
    auto s = spec_for(Distribution::uniform, 40.0, 3, 9);
    const auto f = make_field(s, 15.0, 30.0);
    std::ostringstream os;
    write_csv(os, f);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x,y");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        const std::string y = line.substr(comma + 1);
        CHECK(y.size() - y.find('.') - 1 == 6);
    }
    CHECK(rows == 3);
}
