#include <qtmpc/dual_mode/ellipse.h>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace qtmpc {

Ellipse::Ellipse(VectorXd center, MatrixXd shape) : _center(std::move(center)), _shape(std::move(shape))
{
    const Eigen::Index p = _center.size();
    if (_shape.rows() != p || _shape.cols() != p) throw std::invalid_argument("Ellipse: shape dimension mismatch");
    if ((_shape - _shape.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("Ellipse: shape matrix not symmetric");
    _shape = 0.5 * (_shape + _shape.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(_shape);
    if (eig.eigenvalues().minCoeff() <= 0.0) throw std::invalid_argument("Ellipse: shape matrix not positive definite");
}

double Ellipse::level(const VectorXd& x) const
{
    const VectorXd d = x - _center;
    return d.dot(_shape * d);
}

double Ellipse::relative_volume() const
{
    return 1.0 / std::sqrt(_shape.determinant());
}

nlohmann::json Ellipse::to_json() const
{
    nlohmann::json j;
    j["center"] = std::vector<double>(_center.data(), _center.data() + _center.size());
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < _shape.rows(); ++r)
    {
        std::vector<double> row(_shape.cols());
        for (Eigen::Index c = 0; c < _shape.cols(); ++c) row[c] = _shape(r, c);
        rows.push_back(row);
    }
    j["matrix"] = rows;
    return j;
}

Ellipse Ellipse::from_json(const nlohmann::json& j)
{
    const auto c    = j.at("center").get<std::vector<double>>();
    const auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
    VectorXd center = Eigen::Map<const VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    MatrixXd E(rows.size(), rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
    {
        if (rows[r].size() != rows.size()) throw std::invalid_argument("Ellipse::from_json: matrix not square");
        for (std::size_t col = 0; col < rows.size(); ++col) E(r, col) = rows[r][col];
    }
    return Ellipse(center, E);
}

}  // namespace qtmpc
