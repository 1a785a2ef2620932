#ifndef GBN_TYPES_HPP
#define GBN_TYPES_HPP

#include <map>
#include <Eigen/Dense>

namespace gbn {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

/// do(X_J = x_J): clamped value per 0-based node. Empty means observational.
template <typename Scalar>
using Intervention = std::map<int, Scalar>;

using InterventionTarget = Intervention<double>;

}  // namespace gbn

#endif  // GBN_TYPES_HPP
