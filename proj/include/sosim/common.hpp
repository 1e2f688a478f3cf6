#pragma once

#include <stdexcept>
#include <string>

namespace sosim {

// Thrown when an internal invariant is violated (a bug or corrupted input,
// not a bad parameter). The CLI maps this to exit code 3.
struct invariant_error : std::runtime_error {
    explicit invariant_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline void check_invariant(bool cond, const std::string& msg) {
    if (!cond) throw invariant_error(msg);
}

}  // namespace sosim
