#ifndef ANNC_TEST_SUPPORT_HPP
#define ANNC_TEST_SUPPORT_HPP

#include "annc/geometry.hpp"

#include <random>
#include <string>
#include <vector>

namespace annc::testing {

inline curve random_curve(std::mt19937_64& rng, std::string id, std::size_t m, std::size_t d,
                          double lo = -3.0, double hi = 3.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> coords(m * d);
    for (auto& x : coords) {
        x = u(rng);
    }
    return curve(std::move(id), d, std::move(coords));
}

inline curve line(std::string id, std::vector<double> xs) {
    return curve(std::move(id), 1, std::move(xs));
}

} // namespace annc::testing

#endif
