#ifndef QTMPC_DUAL_MODE_ELLIPSE_H_
#define QTMPC_DUAL_MODE_ELLIPSE_H_

#include <Eigen/Core>

#include <json.hpp>

namespace qtmpc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// {x : (x - center)' E (x - center) <= 1}.
class Ellipse
{
 public:
    Ellipse() = default;
    /// Throws std::invalid_argument unless E is symmetric (1e-12) and positive definite.
    Ellipse(VectorXd center, MatrixXd shape);

    const VectorXd& center() const { return _center; }
    const MatrixXd& shape() const { return _shape; }
    int dim() const { return static_cast<int>(_center.size()); }

    double level(const VectorXd& x) const;
    bool contains(const VectorXd& x, double tolerance = 0.0) const { return level(x) <= 1.0 + tolerance; }
    /// Volume up to the unit-ball constant: 1 / sqrt(det E).
    double relative_volume() const;
    Ellipse translated(const VectorXd& new_center) const { return Ellipse(new_center, _shape); }

    nlohmann::json to_json() const;
    static Ellipse from_json(const nlohmann::json& j);

 private:
    VectorXd _center;
    MatrixXd _shape;
};

}  // namespace qtmpc

#endif  // QTMPC_DUAL_MODE_ELLIPSE_H_
