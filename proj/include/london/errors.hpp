#pragma once

#include <stdexcept>
#include <string>

namespace london {

// Signals a loss of accuracy that makes a result meaningless (underflow in a
// recurrence, non-converged quadrature, unresolved truncation tail).
class precision_error : public std::runtime_error {
public:
    explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

// A per-degree block that cannot be inverted reliably.
class singular_mode_error : public std::runtime_error {
public:
    singular_mode_error(int degree, const std::string& what)
        : std::runtime_error(what), degree_(degree) {}
    int degree() const noexcept { return degree_; }

private:
    int degree_;
};

// Derived quantity requested for data where it is undefined (e.g. relative
// error against a zero norm).
class undefined_error : public std::runtime_error {
public:
    explicit undefined_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace london
