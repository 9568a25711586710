#include "cvax/cube.hpp"
#include "cvax/errors.hpp"

namespace cvax {

void ValueCube::check_compatible(const ValueCube& other) const {
    require(grid.times == other.grid.times,
            "value cubes on different grids cannot be combined");
    require(n_paths == other.n_paths,
            "value cubes with different path counts cannot be combined");
    require(scenario_seed == other.scenario_seed,
            "value cubes from different scenario sets cannot be combined");
}

ValueCube& ValueCube::operator+=(const ValueCube& other) {
    check_compatible(other);
    for (std::size_t k = 0; k < values.size(); ++k)
        values[k] += other.values[k];
    id += "+" + other.id;
    return *this;
}

} // namespace cvax
