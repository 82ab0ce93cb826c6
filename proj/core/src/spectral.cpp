#include "rns/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace rns::spectral {

namespace {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 normalized(const Vec3& a) {
    const double n = std::sqrt(dot(a, a));
    return {a[0] / n, a[1] / n, a[2] / n};
}

Vec3 to_vec(const IVec3& k) {
    return {static_cast<double>(k[0]), static_cast<double>(k[1]), static_cast<double>(k[2])};
}

int norm_inf(const IVec3& k) {
    return std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
}

int norm_sq(const IVec3& k) { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; }

bool lex_less(const IVec3& a, const IVec3& b) {
    if (a[0] != b[0]) return a[0] < b[0];
    if (a[1] != b[1]) return a[1] < b[1];
    return a[2] < b[2];
}

bool is_representative(const IVec3& k) {
    for (int i = 0; i < 3; ++i) {
        if (k[i] > 0) return true;
        if (k[i] < 0) return false;
    }
    return false; // k = 0
}

// dim-1 orthonormal polarization vectors perpendicular to k, chosen
// deterministically from k alone.
std::array<Vec3, 2> polarizations(int dim, const IVec3& k) {
    std::array<Vec3, 2> e{};
    const Vec3 kv = to_vec(k);
    if (dim == 2) {
        const double n = std::sqrt(dot(kv, kv));
        e[0] = {-kv[1] / n, kv[0] / n, 0.0};
        return e;
    }
    int axis = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(k[i]) < std::abs(k[axis])) axis = i;
    Vec3 ref{0.0, 0.0, 0.0};
    ref[axis] = 1.0;
    e[0] = normalized(cross(kv, ref));
    e[1] = normalized(cross(kv, e[0]));
    return e;
}

constexpr double inv_sqrt2 = 0.70710678118654752440;
constexpr double sqrt2 = 1.41421356237309504880;

} // namespace

std::pair<int, bool> GalerkinModel::locate(const IVec3& k) const {
    const int N = cutoff;
    if (norm_inf(k) > N || (k[0] == 0 && k[1] == 0 && k[2] == 0)) return {-1, false};
    const int s = side_;
    const std::size_t idx = static_cast<std::size_t>(((k[0] + N) * s + (k[1] + N)) * s + (k[2] + N));
    const std::int32_t v = cube_[idx];
    if (v == 0) return {-1, false};
    return v > 0 ? std::pair<int, bool>{v - 1, false} : std::pair<int, bool>{-v - 1, true};
}

Vec3 leray_project(const IVec3& k, const Vec3& a) {
    const Vec3 kv = to_vec(k);
    const double k2 = dot(kv, kv);
    if (k2 == 0.0) return a;
    const double s = dot(a, kv) / k2;
    return {a[0] - s * kv[0], a[1] - s * kv[1], a[2] - s * kv[2]};
}

GalerkinModel build_torus_model(int dim, int N, double nu,
                                const std::vector<ForcingMode>& forcing, bool advection) {
    if (dim != 2 && dim != 3) throw ConfigError("model: dim must be 2 or 3");
    if (N < 1) throw ConfigError("model: cutoff N must be >= 1");
    if ((dim == 2 && N > 8) || (dim == 3 && N > 4))
        throw ConfigError("model: cutoff exceeds the desk-scale budget (N <= 8 in 2D, N <= 4 in 3D)");
    if (!(nu > 0.0)) throw ConfigError("model: viscosity nu must be positive");

    GalerkinModel m;
    m.dim = dim;
    m.cutoff = N;
    m.nu = nu;
    m.advection = advection;
    m.side_ = 2 * N + 1;

    // Representatives: 0 < |k|_inf <= N, first nonzero component positive;
    // 2D keeps k in the z = 0 plane.
    for (int k0 = -N; k0 <= N; ++k0)
        for (int k1 = -N; k1 <= N; ++k1)
            for (int k2 = (dim == 3 ? -N : 0); k2 <= (dim == 3 ? N : 0); ++k2) {
                const IVec3 k{k0, k1, k2};
                if (norm_inf(k) == 0 || !is_representative(k)) continue;
                Representative r;
                r.k = k;
                r.lambda = static_cast<double>(norm_sq(k));
                r.e = polarizations(dim, k);
                r.mode_index = {{{-1, -1}, {-1, -1}}};
                m.reps.push_back(r);
            }
    std::sort(m.reps.begin(), m.reps.end(), [](const Representative& a, const Representative& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        return lex_less(a.k, b.k);
    });

    m.cube_.assign(static_cast<std::size_t>(m.side_) * m.side_ * m.side_, 0);
    auto cube_slot = [&](const IVec3& k) -> std::int32_t& {
        return m.cube_[static_cast<std::size_t>(((k[0] + N) * m.side_ + (k[1] + N)) * m.side_ +
                                                (k[2] + N))];
    };
    for (std::size_t r = 0; r < m.reps.size(); ++r) {
        const IVec3& k = m.reps[r].k;
        cube_slot(k) = static_cast<std::int32_t>(r + 1);
        const IVec3 nk{-k[0], -k[1], -k[2]};
        cube_slot(nk) = -static_cast<std::int32_t>(r + 1);
        m.wavevectors.push_back(k);
        m.wavevectors.push_back(nk);
    }

    for (std::size_t r = 0; r < m.reps.size(); ++r)
        for (int pol = 0; pol < dim - 1; ++pol)
            for (int ph = 0; ph < 2; ++ph) {
                Mode mode;
                mode.k = m.reps[r].k;
                mode.polarization = pol;
                mode.phase = static_cast<Phase>(ph);
                mode.lambda = m.reps[r].lambda;
                mode.e = m.reps[r].e[static_cast<std::size_t>(pol)];
                m.reps[r].mode_index[static_cast<std::size_t>(pol)][static_cast<std::size_t>(ph)] =
                    static_cast<int>(m.modes.size());
                m.modes.push_back(mode);
                m.lambda.push_back(mode.lambda);
            }
    m.lambda_1 = m.lambda.empty() ? 0.0 : *std::min_element(m.lambda.begin(), m.lambda.end());

    m.f_coeffs = project_modes(m, forcing, &m.forcing_projected);
    m.f_norm_Vstar = norm_Vstar(m, m.f_coeffs);
    return m;
}

StateVector project_modes(const GalerkinModel& model, const std::vector<ForcingMode>& terms,
                          bool* dropped_part) {
    StateVector out(model.n_modes());
    bool dropped = false;
    for (const auto& fm : terms) {
        if (model.dim == 2 && (fm.k[2] != 0 || fm.amp_cos[2] != 0.0 || fm.amp_sin[2] != 0.0))
            throw ConfigError("spectral term: z components must vanish for dim = 2");
        if (norm_inf(fm.k) == 0) {
            dropped = true; // constant field has no zero-mean part
            continue;
        }
        auto [rep, negated] = model.locate(fm.k);
        if (rep < 0) throw ConfigError("spectral term: wavevector outside the truncation");
        Vec3 ac = fm.amp_cos;
        Vec3 as = fm.amp_sin;
        if (negated) as = {-as[0], -as[1], -as[2]};
        const auto& R = model.reps[static_cast<std::size_t>(rep)];
        const Vec3 pc = leray_project(R.k, ac);
        const Vec3 ps = leray_project(R.k, as);
        const Vec3 dc{ac[0] - pc[0], ac[1] - pc[1], ac[2] - pc[2]};
        const Vec3 ds{as[0] - ps[0], as[1] - ps[1], as[2] - ps[2]};
        if (std::sqrt(dot(dc, dc)) + std::sqrt(dot(ds, ds)) >
            1e-14 * (1.0 + std::sqrt(dot(ac, ac)) + std::sqrt(dot(as, as))))
            dropped = true;
        for (int pol = 0; pol < model.dim - 1; ++pol) {
            const auto& e = R.e[static_cast<std::size_t>(pol)];
            out[static_cast<std::size_t>(R.mode_index[static_cast<std::size_t>(pol)][0])] += dot(pc, e);
            out[static_cast<std::size_t>(R.mode_index[static_cast<std::size_t>(pol)][1])] += dot(ps, e);
        }
    }
    if (dropped_part) *dropped_part = dropped;
    return out;
}

FieldCoeffs to_complex(const GalerkinModel& model, const StateVector& u) {
    if (u.size() != model.n_modes()) throw ConfigError("state does not conform to model");
    FieldCoeffs out(model.reps.size(), {std::complex<double>(0), std::complex<double>(0),
                                        std::complex<double>(0)});
    for (std::size_t r = 0; r < model.reps.size(); ++r) {
        const auto& R = model.reps[r];
        for (int pol = 0; pol < model.dim - 1; ++pol) {
            const double a = u[static_cast<std::size_t>(R.mode_index[static_cast<std::size_t>(pol)][0])];
            const double b = u[static_cast<std::size_t>(R.mode_index[static_cast<std::size_t>(pol)][1])];
            const std::complex<double> z(a * inv_sqrt2, -b * inv_sqrt2);
            const auto& e = R.e[static_cast<std::size_t>(pol)];
            for (int c = 0; c < 3; ++c) out[r][static_cast<std::size_t>(c)] += z * e[static_cast<std::size_t>(c)];
        }
    }
    return out;
}

StateVector project_complex(const GalerkinModel& model, const FieldCoeffs& field) {
    StateVector out(model.n_modes());
    for (std::size_t r = 0; r < model.reps.size(); ++r) {
        const auto& R = model.reps[r];
        for (int pol = 0; pol < model.dim - 1; ++pol) {
            const auto& e = R.e[static_cast<std::size_t>(pol)];
            std::complex<double> z(0.0, 0.0);
            for (int c = 0; c < 3; ++c) z += field[r][static_cast<std::size_t>(c)] * e[static_cast<std::size_t>(c)];
            out[static_cast<std::size_t>(R.mode_index[static_cast<std::size_t>(pol)][0])] = sqrt2 * z.real();
            out[static_cast<std::size_t>(R.mode_index[static_cast<std::size_t>(pol)][1])] = -sqrt2 * z.imag();
        }
    }
    return out;
}

FieldCoeffs advect(const GalerkinModel& model, const FieldCoeffs& u_hat,
                   const FieldCoeffs& v_hat) {
    using cd = std::complex<double>;
    const std::size_t R = model.reps.size();
    FieldCoeffs out(R, {cd(0), cd(0), cd(0)});

    // Signed expansion: coefficients at -k are conjugates.
    struct Signed {
        IVec3 k;
        std::array<cd, 3> val;
    };
    std::vector<Signed> us, vs;
    us.reserve(2 * R);
    vs.reserve(2 * R);
    for (std::size_t r = 0; r < R; ++r) {
        const IVec3& k = model.reps[r].k;
        const IVec3 nk{-k[0], -k[1], -k[2]};
        us.push_back({k, u_hat[r]});
        us.push_back({nk, {std::conj(u_hat[r][0]), std::conj(u_hat[r][1]), std::conj(u_hat[r][2])}});
        vs.push_back({k, v_hat[r]});
        vs.push_back({nk, {std::conj(v_hat[r][0]), std::conj(v_hat[r][1]), std::conj(v_hat[r][2])}});
    }

    for (const auto& a : us) {
        for (const auto& b : vs) {
            const IVec3 q{a.k[0] + b.k[0], a.k[1] + b.k[1], a.k[2] + b.k[2]};
            const auto [rep, negated] = model.locate(q);
            // Contributions landing at -rep are the conjugates of the pair
            // (-k, -m) landing at +rep; folding them in would double count.
            if (rep < 0 || negated) continue;
            // i (u_hat(k) . m) v_hat(m), m = b.k
            const cd s = cd(0.0, 1.0) * (a.val[0] * static_cast<double>(b.k[0]) +
                                         a.val[1] * static_cast<double>(b.k[1]) +
                                         a.val[2] * static_cast<double>(b.k[2]));
            auto& slot = out[static_cast<std::size_t>(rep)];
            for (int c = 0; c < 3; ++c)
                slot[static_cast<std::size_t>(c)] += s * b.val[static_cast<std::size_t>(c)];
        }
    }
    return out;
}

double trilinear_b(const GalerkinModel& model, const StateVector& u, const StateVector& v,
                   const StateVector& w) {
    if (u.size() != model.n_modes() || v.size() != model.n_modes() || w.size() != model.n_modes())
        throw ConfigError("trilinear form: dimension mismatch");
    const FieldCoeffs conv = advect(model, to_complex(model, u), to_complex(model, v));
    const FieldCoeffs w_hat = to_complex(model, w);
    double sum = 0.0;
    for (std::size_t r = 0; r < conv.size(); ++r) {
        std::complex<double> z(0.0, 0.0);
        for (int c = 0; c < 3; ++c)
            z += conv[r][static_cast<std::size_t>(c)] * std::conj(w_hat[r][static_cast<std::size_t>(c)]);
        sum += 2.0 * z.real();
    }
    return sum;
}

StateVector nonlinear_term(const GalerkinModel& model, const StateVector& u) {
    const FieldCoeffs u_hat = to_complex(model, u);
    const FieldCoeffs conv = advect(model, u_hat, u_hat);
    StateVector n = project_complex(model, conv);
    for (auto& x : n.c) x = -x;
    return n;
}

double norm_H(const StateVector& u) {
    double s = 0.0;
    for (double x : u.c) s += x * x;
    return std::sqrt(s);
}

double norm_H_diff(const StateVector& u, const StateVector& v) {
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double d = u[j] - v[j];
        s += d * d;
    }
    return std::sqrt(s);
}

double norm_V(const GalerkinModel& model, const StateVector& u) {
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) s += model.lambda[j] * u[j] * u[j];
    return std::sqrt(s);
}

double norm_Vstar(const GalerkinModel& model, const StateVector& f) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * f[j] / model.lambda[j];
    return std::sqrt(s);
}

double weak_metric(const StateVector& u, const StateVector& v) {
    double s = 0.0;
    double w = 1.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        w *= 0.5;
        if (w == 0.0) break;
        const double d = std::abs(u[j] - v[j]);
        s += w * d / (1.0 + d);
    }
    return s;
}

double inner(const StateVector& u, const StateVector& v) {
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) s += u[j] * v[j];
    return s;
}

CollocationGrid::CollocationGrid(const GalerkinModel& model, int n) : model_(model), n_(n) {
    if (n < 2) throw ConfigError("collocation grid: n must be >= 2");
    const double step = 2.0 * M_PI / n;
    if (model.dim == 2) {
        xs_.reserve(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) xs_.push_back({i * step, j * step, 0.0});
    } else {
        xs_.reserve(static_cast<std::size_t>(n) * n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) xs_.push_back({i * step, j * step, l * step});
    }
    cos_table_.resize(model.reps.size());
    sin_table_.resize(model.reps.size());
    for (std::size_t r = 0; r < model.reps.size(); ++r) {
        const Vec3 k = to_vec(model.reps[r].k);
        auto& ct = cos_table_[r];
        auto& st = sin_table_[r];
        ct.resize(xs_.size());
        st.resize(xs_.size());
        for (std::size_t p = 0; p < xs_.size(); ++p) {
            const double phase = dot(k, xs_[p]);
            ct[p] = sqrt2 * std::cos(phase);
            st[p] = sqrt2 * std::sin(phase);
        }
    }
}

std::vector<Vec3> CollocationGrid::eval_velocity(const StateVector& u) const {
    std::vector<Vec3> out(points(), Vec3{0.0, 0.0, 0.0});
    for (std::size_t r = 0; r < model_.reps.size(); ++r) {
        const auto& R = model_.reps[r];
        Vec3 a{0.0, 0.0, 0.0}, b{0.0, 0.0, 0.0};
        for (int pol = 0; pol < model_.dim - 1; ++pol) {
            const auto& e = R.e[static_cast<std::size_t>(pol)];
            const double cc = u[static_cast<std::size_t>(R.mode_index[static_cast<std::size_t>(pol)][0])];
            const double cs = u[static_cast<std::size_t>(R.mode_index[static_cast<std::size_t>(pol)][1])];
            for (int c = 0; c < 3; ++c) {
                a[static_cast<std::size_t>(c)] += cc * e[static_cast<std::size_t>(c)];
                b[static_cast<std::size_t>(c)] += cs * e[static_cast<std::size_t>(c)];
            }
        }
        const auto& ct = cos_table_[r];
        const auto& st = sin_table_[r];
        for (std::size_t p = 0; p < out.size(); ++p) {
            out[p][0] += a[0] * ct[p] + b[0] * st[p];
            out[p][1] += a[1] * ct[p] + b[1] * st[p];
            out[p][2] += a[2] * ct[p] + b[2] * st[p];
        }
    }
    return out;
}

StateVector CollocationGrid::project(const std::vector<Vec3>& field) const {
    if (field.size() != points()) throw ConfigError("collocation projection: field size mismatch");
    StateVector out(model_.n_modes());
    const double inv_p = 1.0 / static_cast<double>(points());
    for (std::size_t r = 0; r < model_.reps.size(); ++r) {
        const auto& ct = cos_table_[r];
        const auto& st = sin_table_[r];
        Vec3 sc{0.0, 0.0, 0.0}, ss{0.0, 0.0, 0.0};
        for (std::size_t p = 0; p < field.size(); ++p) {
            for (int c = 0; c < 3; ++c) {
                sc[static_cast<std::size_t>(c)] += field[p][static_cast<std::size_t>(c)] * ct[p];
                ss[static_cast<std::size_t>(c)] += field[p][static_cast<std::size_t>(c)] * st[p];
            }
        }
        const auto& R = model_.reps[r];
        for (int pol = 0; pol < model_.dim - 1; ++pol) {
            const auto& e = R.e[static_cast<std::size_t>(pol)];
            out[static_cast<std::size_t>(R.mode_index[static_cast<std::size_t>(pol)][0])] = dot(sc, e) * inv_p;
            out[static_cast<std::size_t>(R.mode_index[static_cast<std::size_t>(pol)][1])] = dot(ss, e) * inv_p;
        }
    }
    return out;
}

std::vector<double> CollocationGrid::eval_scalar(const ScalarField& f) const {
    std::vector<double> out(points(), 0.0);
    for (const auto& term : f) {
        if (norm_inf(term.k) == 0) {
            for (auto& v : out) v += term.amp_cos;
            continue;
        }
        const Vec3 k = to_vec(term.k);
        for (std::size_t p = 0; p < out.size(); ++p) {
            const double phase = dot(k, xs_[p]);
            out[p] += sqrt2 * (term.amp_cos * std::cos(phase) + term.amp_sin * std::sin(phase));
        }
    }
    return out;
}

double CollocationGrid::scalar_norm_Lq(const ScalarField& f, double q) const {
    const std::vector<double> vals = eval_scalar(f);
    double acc = 0.0;
    for (double v : vals) acc += std::pow(std::abs(v), q);
    return std::pow(acc / static_cast<double>(vals.size()), 1.0 / q);
}

} // namespace rns::spectral
