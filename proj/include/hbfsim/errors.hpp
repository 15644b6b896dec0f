// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace hbfsim {

// Bad user-supplied configuration or arguments (CLI exit code 2).
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

// No feasible solution exists or could be found (CLI exit code 3).
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

// A Gram or system matrix is numerically singular past the working threshold.
class ill_conditioned_error : public std::runtime_error {
public:
    explicit ill_conditioned_error(const std::string& what) : std::runtime_error(what) {}
};

// A combiner passed to the SE evaluator lost column rank.
class singular_combiner_error : public std::runtime_error {
public:
    explicit singular_combiner_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hbfsim
