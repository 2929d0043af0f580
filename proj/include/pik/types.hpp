#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace pik {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Thrown when an evaluator produces NaN or otherwise corrupt data.
struct data_error : std::runtime_error {
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on config-file schema violations; carries the offending field path.
struct config_error : std::runtime_error {
  std::string field;
  config_error(std::string field_path, const std::string& what)
      : std::runtime_error(field_path + ": " + what), field(std::move(field_path)) {}
};

inline bool all_finite(const Mat& a) { return a.allFinite(); }
inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace pik
