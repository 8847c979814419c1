#pragma once

#include <array>

#include "mvns/fields.hpp"
#include "mvns/geometry.hpp"

namespace mvns {

/// Both vector components at the sample points of each component grid.
/// v[s][k] holds component k at the points of component grid s. A field "on O_t" is
/// represented by its values at the image points r(t, .) of these sample points.
struct StaggeredSamples {
    Grid grid;
    std::array<std::array<Array2, 2>, 2> v;

    StaggeredSamples() = default;
    explicit StaggeredSamples(const Grid& g);
};

/// Collocates a staggered field (off components interpolated, walls zero).
StaggeredSamples collocate(const VectorField& v);
/// Native components of each sample set.
VectorField to_vector_field(const StaggeredSamples& s);

/// u~ = Jinv u at matched sample points.
StaggeredSamples piola_forward(const StaggeredSamples& u, const MotionSample& s);
/// v-bar = J v at matched sample points.
StaggeredSamples piola_inverse(const StaggeredSamples& v, const MotionSample& s);
VectorField piola_forward_field(const StaggeredSamples& u, const MotionSample& s);
StaggeredSamples piola_inverse_field(const VectorField& v, const MotionSample& s);

/// (nabla_j v)_i at each component grid, stored g[s][2*i + j].
struct CovariantGradient {
    Grid grid;
    std::array<std::array<Array2, 4>, 2> g;
};

/// Central differences plus Christoffel correction; wall slots use one-sided normal differences.
CovariantGradient covariant_gradient(const VectorField& v, const MetricData& m);

struct DivergenceReport {
    double max_abs = 0.0;
    bool ok = false;
};
DivergenceReport check_divergence_free(const VectorField& v, double tol);

}  // namespace mvns
