#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace accrestart {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

// Error families map onto CLI exit codes (2, 3, 4).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SolverKind { ista, fista, apg, approx };

/// Implementation path for the coordinate method: sparse cumulative
/// aggregates, or the literal full-vector iteration.
enum class Engine { efficient, naive };

} // namespace accrestart
