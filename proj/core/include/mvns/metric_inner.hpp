#pragma once

#include "mvns/fields.hpp"
#include "mvns/geometry.hpp"

namespace mvns {

/// (v,w)_{1,t} = int h^{kl} h_ij (nabla_k v)_i (nabla_l w)_j, averaged over both sample grids.
double inner_1t(const VectorField& v, const VectorField& w, const MetricData& m);
double norm_1t(const VectorField& v, const MetricData& m);

/// Pointwise h v with the off-diagonal coupling symmetrized so that <h v, w> = <v, h w>.
VectorField apply_h(const VectorField& v, const MetricData& m);
/// Same construction with dh/dt in place of h.
VectorField apply_dh_dt(const VectorField& v, const MetricData& m);

/// (v,w)_{0,t} = int h_ij v_i w_j.
double inner_0t(const VectorField& v, const VectorField& w, const MetricData& m);
double norm_0t(const VectorField& v, const MetricData& m);

/// Metric of the identity motion on grid g.
MetricData identity_metric(const Grid& g);

}  // namespace mvns
