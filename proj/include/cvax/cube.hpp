#ifndef CVAX_CUBE_HPP
#define CVAX_CUBE_HPP

#include "cvax/timegrid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cvax {

// Per-(time, path) values of one deal or netting set on a scenario set:
// the value of all remaining (unexercised, future) flows as seen at that
// time and path. Write-once, file-backed via gridstore.
struct ValueCube {
    std::string id;
    TimeGrid grid;
    std::size_t n_paths = 0;
    std::uint64_t scenario_seed = 0;
    std::uint64_t grid_hash = 0;
    std::vector<double> values;              // time-major
    std::vector<std::uint8_t> exercised;     // empty for linear deals

    double value(std::size_t time, std::size_t path) const {
        return values[time * n_paths + path];
    }
    double& value(std::size_t time, std::size_t path) {
        return values[time * n_paths + path];
    }
    bool has_exercise() const { return !exercised.empty(); }
    bool is_exercised(std::size_t time, std::size_t path) const {
        return exercised[time * n_paths + path] != 0;
    }

    void check_compatible(const ValueCube& other) const;

    // Element-wise sum, id concatenated.
    ValueCube& operator+=(const ValueCube& other);
};

} // namespace cvax

#endif
