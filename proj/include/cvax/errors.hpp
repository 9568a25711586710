#ifndef CVAX_ERRORS_HPP
#define CVAX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cvax {

// Input/contract violations (bad files, bad parameters, mismatched grids).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures (non-PSD matrices, optimizer breakdown).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InputError(msg);
}

} // namespace cvax

#endif
