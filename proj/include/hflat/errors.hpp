#pragma once

#include <stdexcept>
#include <string>

namespace hflat {

/// Input lies outside the region where a construction or measurement is defined
/// (vanishing twist, singular metric, degenerate frame, non-finite state).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hflat
