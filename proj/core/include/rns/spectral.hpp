// Galerkin phase space on the periodic torus: divergence-free real Fourier
// basis (2D and 3D), Stokes eigenvalues, the exact trilinear form over the
// truncation, H/V norms and the weak coordinate metric.
//
// Basis convention: for each representative wavevector k (first nonzero
// component positive, 0 < |k|_inf <= N) and each of the dim-1 unit
// polarization vectors e ⊥ k, the two real fields
//   sqrt(2) cos(k.x) e   and   sqrt(2) sin(k.x) e
// are orthonormal under the normalized inner product
// (u,v) = (2pi)^{-dim} ∫ u.v dx, and A w = |k|^2 w. Coefficients are real;
// conjugate symmetry between k and -k is baked into the basis.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "rns/common.hpp"

namespace rns::spectral {

using Vec3 = std::array<double, 3>;
using IVec3 = std::array<int, 3>;

enum class Phase : std::uint8_t { cos = 0, sin = 1 };

struct Mode {
    IVec3 k;           // representative wavevector
    int polarization;  // 0 .. dim-2
    Phase phase;
    double lambda;     // |k|^2, Stokes eigenvalue
    Vec3 e;            // unit polarization vector, e . k = 0
};

/// One spectral term of a vector forcing: f += sqrt(2)(a_cos cos(k.x) +
/// a_sin sin(k.x)). Non-divergence-free parts are Leray-projected away.
struct ForcingMode {
    IVec3 k{};
    Vec3 amp_cos{};
    Vec3 amp_sin{};
};

/// One spectral term of a real scalar field (eta1/eta2 in the diffusion
/// term). k = 0 means the constant amp_cos.
struct ScalarTerm {
    IVec3 k{};
    double amp_cos = 0.0;
    double amp_sin = 0.0;
};
using ScalarField = std::vector<ScalarTerm>;

struct StateVector {
    std::vector<double> c;

    StateVector() = default;
    explicit StateVector(std::size_t n) : c(n, 0.0) {}
    std::size_t size() const { return c.size(); }
    double& operator[](std::size_t j) { return c[j]; }
    double operator[](std::size_t j) const { return c[j]; }
};

// Representative wavevector bookkeeping used by the convolution kernels.
struct Representative {
    IVec3 k;
    double lambda;
    std::array<Vec3, 2> e;             // dim-1 polarization vectors
    std::array<std::array<int, 2>, 2> mode_index; // [pol][phase] -> mode id
};

class GalerkinModel {
public:
    int dim = 3;
    int cutoff = 0;       // N: modes with 0 < |k|_inf <= N
    double nu = 1.0;
    bool advection = true;

    std::vector<Mode> modes;       // sorted by (lambda, lex k, polarization, phase)
    std::vector<double> lambda;    // per mode
    double lambda_1 = 0.0;

    std::vector<Representative> reps;
    std::vector<IVec3> wavevectors; // all signed k, reported in manifests

    StateVector f_coeffs;
    double f_norm_Vstar = 0.0;
    bool forcing_projected = false; // input forcing had a gradient / mean part

    std::size_t n_modes() const { return modes.size(); }

    /// (rep index, negated?) of a signed wavevector; rep < 0 when |k|_inf
    /// exceeds the cutoff or k = 0.
    std::pair<int, bool> locate(const IVec3& k) const;

private:
    friend GalerkinModel build_torus_model(int, int, double,
                                           const std::vector<ForcingMode>&, bool);
    std::vector<std::int32_t> cube_; // dense (2N+1)^3 lookup table
    int side_ = 0;
};

GalerkinModel build_torus_model(int dim, int N, double nu,
                                const std::vector<ForcingMode>& forcing = {},
                                bool advection = true);

/// I - k k^T / |k|^2 applied to a; exact and idempotent.
Vec3 leray_project(const IVec3& k, const Vec3& a);

/// Projects a list of spectral vector terms onto the model basis (Leray
/// projection plus truncation). Sets *dropped_part when a gradient or mean
/// component was removed. Wavevectors outside the truncation are rejected.
StateVector project_modes(const GalerkinModel& model, const std::vector<ForcingMode>& terms,
                          bool* dropped_part = nullptr);

// Complex Fourier coefficients at the representative wavevectors; the
// value at -k is the conjugate.
using FieldCoeffs = std::vector<std::array<std::complex<double>, 3>>;

FieldCoeffs to_complex(const GalerkinModel& model, const StateVector& u);
StateVector project_complex(const GalerkinModel& model, const FieldCoeffs& field);

/// Fourier coefficients of (u . grad) v by exact truncated convolution.
FieldCoeffs advect(const GalerkinModel& model, const FieldCoeffs& u_hat,
                   const FieldCoeffs& v_hat);

/// b(u,v,w) = <(u.grad)v, w>, exact over the truncation.
double trilinear_b(const GalerkinModel& model, const StateVector& u,
                   const StateVector& v, const StateVector& w);

/// N(u)_j = -b(u,u,w_j); satisfies <N(u),u> = 0.
StateVector nonlinear_term(const GalerkinModel& model, const StateVector& u);

double norm_H(const StateVector& u);
double norm_H_diff(const StateVector& u, const StateVector& v);
double norm_V(const GalerkinModel& model, const StateVector& u);
/// Dual norm: ||f||_{V*}^2 = sum f_j^2 / lambda_j.
double norm_Vstar(const GalerkinModel& model, const StateVector& f);

/// d_w(u,v) = sum_j 2^{-j} |u_j - v_j| / (1 + |u_j - v_j|), j from 1 in
/// mode order. Value in [0,1); not a norm.
double weak_metric(const StateVector& u, const StateVector& v);

double inner(const StateVector& u, const StateVector& v);

/// Uniform n^dim collocation grid on [0,2pi)^dim with precomputed basis
/// tables; quadrature is the plain grid mean (exact for trig polynomials
/// that do not alias, i.e. total wavenumber below n per axis).
class CollocationGrid {
public:
    CollocationGrid(const GalerkinModel& model, int n);

    int n() const { return n_; }
    std::size_t points() const { return xs_.size(); }
    const std::vector<Vec3>& coordinates() const { return xs_; }

    /// Velocity field values of a coefficient vector at every grid point.
    std::vector<Vec3> eval_velocity(const StateVector& u) const;

    /// L2 projection of a sampled vector field onto the model basis
    /// (divergence-free truncation, so this includes the Leray projection).
    StateVector project(const std::vector<Vec3>& field) const;

    /// Scalar field values at every grid point.
    std::vector<double> eval_scalar(const ScalarField& f) const;

    /// Grid-mean estimate of ||f||_{L^q}.
    double scalar_norm_Lq(const ScalarField& f, double q) const;

private:
    const GalerkinModel& model_;
    int n_;
    std::vector<Vec3> xs_;
    // per representative: sqrt(2) cos(k.x_p), sqrt(2) sin(k.x_p)
    std::vector<std::vector<double>> cos_table_, sin_table_;
};

} // namespace rns::spectral
