#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semirigid {

/// Bad input data: malformed catalog rows, inconsistent frame configs,
/// designs that reference sections outside a group pool.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotFoundError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Raised when the reduced stiffness matrix is not positive definite.
class UnstableStructure : public std::runtime_error {
public:
    UnstableStructure(std::size_t node, int component, std::size_t pivot)
        : std::runtime_error("unstable structure: non-positive pivot " + std::to_string(pivot) +
                             " at node " + std::to_string(node) + " dof " + component_name(component)),
          node_(node), component_(component) {}

    std::size_t node() const noexcept { return node_; }
    int component() const noexcept { return component_; }

private:
    static std::string component_name(int c) {
        switch (c) {
        case 0: return "ux";
        case 1: return "uy";
        default: return "rz";
        }
    }

    std::size_t node_;
    int component_;
};

} // namespace semirigid
