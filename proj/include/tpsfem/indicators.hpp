#pragma once

#include "tpsfem/saddle.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace tpsfem {

enum class IndicatorKind { auxiliary, recovery };

std::string to_string(IndicatorKind k);
IndicatorKind parse_indicator_kind(const std::string& s);

/// Edge-keyed indicator values. Keys name edges by node pair so values survive
/// refinement of other parts of the mesh.
struct IndicatorField {
    IndicatorKind kind = IndicatorKind::recovery;
    std::map<EdgeKey, double> values;

    double max() const;
};

/// Per-triangle recovery indicator: the gradient recovered by lumped-mass
/// projection minus the piecewise-constant gradient, squared and integrated
/// exactly, summed over both components; returns the square root.
std::vector<double> recovery_indicators(const Smoother& s);
double recovery_indicator(const Smoother& s, TriId t);

/// Nodal recovered gradient (lumped-mass projection).
std::array<Eigen::VectorXd, 2> recovered_gradient(const Smoother& s);

/// Assigns each triangle's value to its base-edge, keeping the maximum.
std::map<EdgeKey, double> triangles_to_base_edges(const TriMesh& mesh, const std::vector<double>& tri_values);

/// Auxiliary-problem indicator: a local smoother on the uniformly refined patch of
/// the edge's triangles and their edge neighbours, with Dirichlet values taken
/// from s, compared with s in the gradient seminorm over the edge's triangles.
class AuxiliaryIndicator {
public:
    AuxiliaryIndicator(const Smoother& s, const DataSet& data, double alpha);

    /// Zero when the patch holds no data or has no free node.
    double operator()(EdgeKey e) const;

private:
    const Smoother* s_;
    const DataSet* data_;
    double alpha_;
    std::vector<std::vector<std::size_t>> tri_data_;
};

double auxiliary_indicator(const Smoother& s, const DataSet& data, EdgeKey e, double alpha);

/// Indicator values for every refinable edge, or only for the listed edges.
IndicatorField compute_indicators(IndicatorKind kind, const Smoother& s, const DataSet& data, double alpha,
                                  const std::set<EdgeKey>* only = nullptr);

/// Maximum strategy: edges with value >= gamma * max, largest values first
/// (ties in edge order). Throws EmptyField.
std::vector<EdgeKey> mark(const IndicatorField& field, double gamma = 0.5);

} // namespace tpsfem
