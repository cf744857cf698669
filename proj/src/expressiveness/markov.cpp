#include <cmath>
#include <string>

#include "tigt/errors.hpp"
#include "tigt/expressiveness.hpp"
#include "tigt/topology.hpp"

namespace tigt {
namespace {

Matrix walk_matrix(const Graph& g) {
    Matrix m = adjacency_matrix(g);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        const auto d = g.degree(v);
        if (d == 0) throw PreconditionError("node " + std::to_string(v) + " has degree zero; D^-1 A is undefined");
        m.row(v) /= static_cast<double>(d);
    }
    return m;
}

}  // namespace

RrwpEncoding rrwp(const Graph& g, std::size_t steps) {
    if (steps == 0) throw PreconditionError("RRWP needs at least one step");
    const Matrix m = walk_matrix(g);
    RrwpEncoding out;
    out.steps = steps;
    out.slices.reserve(steps);
    out.slices.push_back(Matrix::Identity(m.rows(), m.cols()));
    for (std::size_t l = 1; l < steps; ++l) out.slices.push_back(out.slices.back() * m);
    return out;
}

StationaryDistribution stationary(const Graph& g) {
    if (g.num_edges() == 0) throw PreconditionError("stationary distribution needs at least one edge");
    const double total = 2.0 * static_cast<double>(g.num_edges());
    StationaryDistribution out{Eigen::VectorXd(static_cast<Eigen::Index>(g.num_nodes()))};
    for (NodeId v = 0; v < g.num_nodes(); ++v) out.pi(v) = static_cast<double>(g.degree(v)) / total;
    return out;
}

ConvergenceReport rrwp_convergence_report(const Graph& g, std::size_t steps) {
    if (connected_components(g).count != 1) {
        throw PreconditionError("convergence report needs a connected graph");
    }
    if (is_bipartite(g)) {
        throw PreconditionError("graph is bipartite: the walk is periodic and has no limit");
    }
    const RrwpEncoding enc = rrwp(g, steps);
    const Eigen::RowVectorXd pi = stationary(g).pi.transpose();

    ConvergenceReport report;
    report.deviations.reserve(steps);
    for (const Matrix& slice : enc.slices) {
        report.deviations.push_back((slice.rowwise() - pi).cwiseAbs().maxCoeff());
    }

    // Least squares for log(dev) = a + b * l.
    constexpr double kFloor = 1e-12;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    for (std::size_t l = 0; l < report.deviations.size(); ++l) {
        const double d = report.deviations[l];
        if (d <= kFloor) continue;
        const double x = static_cast<double>(l);
        const double y = std::log(d);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2) {
        // Converged (to within the floor) after at most one step.
        report.fitted_rate = 0.0;
        report.envelope_constant = report.deviations.empty() ? 0.0 : report.deviations.front();
        report.geometric_decay = true;
        return report;
    }
    const double cn = static_cast<double>(count);
    const double slope = (cn * sxy - sx * sy) / (cn * sxx - sx * sx);
    report.fitted_rate = std::exp(slope);

    double c = 0.0;
    for (std::size_t l = 0; l < report.deviations.size(); ++l) {
        const double d = report.deviations[l];
        if (d <= kFloor) continue;
        c = std::max(c, d / std::pow(report.fitted_rate, static_cast<double>(l)));
    }
    report.envelope_constant = c;
    report.geometric_decay = report.fitted_rate < 1.0 && std::isfinite(c);
    return report;
}

}  // namespace tigt
