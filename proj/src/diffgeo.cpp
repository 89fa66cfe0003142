#include "hflat/diffgeo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hflat/errors.hpp"

namespace hflat {

double MetricData::sectional(std::size_t i, std::size_t j) const {
    double Rijji = 0.0;  // <R(d_i,d_j)d_j, d_i>
    for (std::size_t m = 0; m < n; ++m) Rijji += g(i, m) * R(m, i, j, j);
    return Rijji / (g(i, i) * g(j, j) - g(i, j) * g(i, j));
}

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& g) {
    if (!g.allFinite()) throw DomainError("metric has non-finite entries");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e8) {
        std::ostringstream msg;
        msg << "singular metric (eigenvalues " << lo << " .. " << hi << ")";
        throw DomainError(msg.str());
    }
    return g.inverse();
}

Eigen::MatrixXd induced_metric(const SampleJet& jet) {
    const std::size_t n = jet.dimension();
    Eigen::MatrixXd g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) g(i, j) = g(j, i) = real_inner(jet.first[i], jet.first[j]);
    return g;
}

Eigen::MatrixXd induced_metric(const ImmersionSampler& sampler, std::span<const double> x) {
    return induced_metric(sampler.evaluate(x));
}

std::vector<double> christoffel_projection(const SampleJet& jet, const Eigen::MatrixXd& ginv) {
    const std::size_t n = jet.dimension();
    std::vector<double> gamma(n * n * n, 0.0);
    std::vector<double> lowered(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t l = 0; l < n; ++l) lowered[l] = real_inner(jet.d2(i, j), jet.first[l]);
            for (std::size_t k = 0; k < n; ++k) {
                double acc = 0.0;
                for (std::size_t l = 0; l < n; ++l) acc += ginv(k, l) * lowered[l];
                gamma[(k * n + i) * n + j] = acc;
            }
        }
    return gamma;
}

std::vector<double> christoffel_from_metric(const MetricField& metric, std::span<const double> x, double h) {
    const Eigen::MatrixXd g = metric(x);
    const std::size_t n = static_cast<std::size_t>(g.rows());
    const Eigen::MatrixXd ginv = checked_inverse(g);
    std::vector<Eigen::MatrixXd> dg(n);  // dg[m](i,j) = d_m g_ij
    std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
    for (std::size_t m = 0; m < n; ++m) {
        xp[m] += h;
        xm[m] -= h;
        dg[m] = (metric(xp) - metric(xm)) / (2.0 * h);
        xp[m] = xm[m] = x[m];
    }
    std::vector<double> gamma(n * n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (std::size_t l = 0; l < n; ++l)
                    acc += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                gamma[(k * n + i) * n + j] = 0.5 * acc;
            }
    return gamma;
}

std::vector<double> riemann_from_christoffel(const ChristoffelField& gamma_field, std::span<const double> x,
                                             double h) {
    const std::vector<double> G = gamma_field(x);
    const auto n = static_cast<std::size_t>(std::lround(std::cbrt(static_cast<double>(G.size()))));
    auto at = [n](const std::vector<double>& v, std::size_t k, std::size_t i, std::size_t j) {
        return v[(k * n + i) * n + j];
    };
    std::vector<std::vector<double>> dG(n);  // dG[m] = d_m Gamma
    std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
    for (std::size_t m = 0; m < n; ++m) {
        xp[m] += h;
        xm[m] -= h;
        const auto Gp = gamma_field(xp);
        const auto Gm = gamma_field(xm);
        dG[m].resize(G.size());
        for (std::size_t r = 0; r < G.size(); ++r) dG[m][r] = (Gp[r] - Gm[r]) / (2.0 * h);
        xp[m] = xm[m] = x[m];
    }
    std::vector<double> R(n * n * n * n, 0.0);
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) {
                    double acc = at(dG[i], l, j, k) - at(dG[j], l, i, k);
                    for (std::size_t m = 0; m < n; ++m)
                        acc += at(G, l, i, m) * at(G, m, j, k) - at(G, l, j, m) * at(G, m, i, k);
                    R[((l * n + i) * n + j) * n + k] = acc;
                }
    return R;
}

double normalized_curvature_max(const std::vector<double>& R, const Eigen::MatrixXd& g) {
    const auto n = static_cast<std::size_t>(g.rows());
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l) {
                    double lowered = 0.0;
                    for (std::size_t m = 0; m < n; ++m) lowered += g(l, m) * R[((m * n + i) * n + j) * n + k];
                    const double scale = std::sqrt(g(i, i) * g(j, j) * g(k, k) * g(l, l));
                    worst = std::max(worst, std::abs(lowered) / scale);
                }
    return worst;
}

MetricData curvature(const ImmersionSampler& sampler, std::span<const double> x, double h, ChristoffelRoute route) {
    MetricData m;
    const SampleJet jet = sampler.evaluate(x);
    m.n = jet.dimension();
    m.g = induced_metric(jet);
    m.ginv = checked_inverse(m.g);
    m.h = h;
    ChristoffelField field;
    if (route == ChristoffelRoute::Projection) {
        field = [&sampler](std::span<const double> y) {
            const SampleJet j = sampler.evaluate(y);
            return christoffel_projection(j, checked_inverse(induced_metric(j)));
        };
        m.christoffel = christoffel_projection(jet, m.ginv);
    } else {
        MetricField metric = [&sampler](std::span<const double> y) { return induced_metric(sampler, y); };
        field = [metric, h](std::span<const double> y) { return christoffel_from_metric(metric, y, h); };
        m.christoffel = christoffel_from_metric(metric, x, h);
    }
    m.riemann = riemann_from_christoffel(field, x, h);
    m.flatness_defect = normalized_curvature_max(m.riemann, m.g);
    return m;
}

MetricData curvature(const MetricField& metric, std::span<const double> x, double h) {
    MetricData m;
    m.g = metric(x);
    m.n = static_cast<std::size_t>(m.g.rows());
    m.ginv = checked_inverse(m.g);
    m.h = h;
    m.christoffel = christoffel_from_metric(metric, x, h);
    m.riemann = riemann_from_christoffel(
        [&metric, h](std::span<const double> y) { return christoffel_from_metric(metric, y, h); }, x, h);
    m.flatness_defect = normalized_curvature_max(m.riemann, m.g);
    return m;
}

MetricField round_sphere_metric() {
    return [](std::span<const double> x) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
        g(0, 0) = 1.0;
        g(1, 1) = std::sin(x[0]) * std::sin(x[0]);
        return g;
    };
}

double lagrangian_defect(const SampleJet& jet) {
    const std::size_t n = jet.dimension();
    double worst = 0.0;
    for (auto axis : kAxes)
        for (std::size_t i = 0; i < n; ++i) {
            const HVector phi = apply_structure(axis, jet.first[i]);
            const double ni = jet.first[i].norm();
            for (std::size_t j = i; j < n; ++j)
                worst = std::max(worst, std::abs(real_inner(phi, jet.first[j])) / (ni * jet.first[j].norm()));
        }
    return worst;
}

double lagrangian_defect(const ImmersionSampler& sampler, std::span<const double> x) {
    return lagrangian_defect(sampler.evaluate(x));
}

double SFFData::mu_norm() const { return std::sqrt(mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2]); }

double SFFData::mu_max_norm() const {
    double worst = 0.0;
    for (const auto& m : mu_per_direction) worst = std::max(worst, std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]));
    return worst;
}

SFFData second_fundamental_form(const SampleJet& jet) {
    SFFData s;
    const std::size_t n = jet.dimension();
    s.n = n;
    const Eigen::MatrixXd g = induced_metric(jet);
    const Eigen::MatrixXd ginv = checked_inverse(g);
    const std::vector<double> gamma = christoffel_projection(jet, ginv);

    s.h.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            HVector hij = jet.d2(i, j);
            for (std::size_t k = 0; k < n; ++k) hij.axpy(-gamma[(k * n + i) * n + j], jet.first[k]);
            s.h[i * n + j] = std::move(hij);
        }

    std::vector<double> len(n);
    for (std::size_t a = 0; a < n; ++a) {
        len[a] = std::sqrt(g(a, a));
        s.frame.push_back((1.0 / len[a]) * jet.first[a]);
    }
    auto H = [&](std::size_t a, std::size_t b) { return (1.0 / (len[a] * len[b])) * s.h[a * n + b]; };

    const HVector h11 = H(0, 0);
    for (std::size_t c = 0; c < 3; ++c) s.lambda[c] = real_inner(h11, apply_structure(kAxes[c], s.frame[0]));
    for (std::size_t j = 1; j < n; ++j) {
        const HVector h1j = H(0, j);
        std::array<double, 3> m{};
        for (std::size_t c = 0; c < 3; ++c) m[c] = real_inner(h1j, apply_structure(kAxes[c], s.frame[j]));
        s.mu_per_direction.push_back(m);
    }
    if (!s.mu_per_direction.empty()) {
        for (const auto& m : s.mu_per_direction)
            for (std::size_t c = 0; c < 3; ++c) s.mu[c] += m[c] / static_cast<double>(s.mu_per_direction.size());
        for (const auto& m : s.mu_per_direction)
            for (std::size_t c = 0; c < 3; ++c) s.mu_spread = std::max(s.mu_spread, std::abs(m[c] - s.mu[c]));
    }

    // Residual against h(e1,e1) = lambda.phi e1, h(e1,ej) = mu.phi ej, h(ej,ej) = mu.phi e1,
    // h(ej,ek) = 0 for j != k >= 2.
    auto combo = [&](const std::array<double, 3>& w, const HVector& e) {
        HVector out(e.size());
        for (std::size_t c = 0; c < 3; ++c) out.axpy(w[c], apply_structure(kAxes[c], e));
        return out;
    };
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            HVector model(jet.value.size());
            if (a == 0 && b == 0) model = combo(s.lambda, s.frame[0]);
            else if (a == 0) model = combo(s.mu, s.frame[b]);
            else if (a == b) model = combo(s.mu, s.frame[0]);
            s.residual = std::max(s.residual, (H(a, b) - model).norm());
        }

    double scale = 0.0;
    for (const auto& hij : s.h) scale = std::max(scale, hij.norm());
    for (std::size_t ij = 0; ij < n * n; ++ij) {
        const double hn = s.h[ij].norm();
        if (hn <= 1e-12 * std::max(scale, 1.0)) continue;
        for (std::size_t k = 0; k < n; ++k)
            s.normality = std::max(s.normality,
                                   std::abs(real_inner(s.h[ij], jet.first[k])) / (hn * jet.first[k].norm()));
    }
    return s;
}

SFFData second_fundamental_form(const ImmersionSampler& sampler, std::span<const double> x) {
    return second_fundamental_form(sampler.evaluate(x));
}

namespace {

// Vector field components (in d_k) of nabla_{e_i} e_1 for the normalized coordinate frame.
std::vector<double> nabla_e1(const MetricData& m, std::size_t i) {
    const std::size_t n = m.n;
    const double g11 = m.g(0, 0);
    const double c = 1.0 / std::sqrt(g11);
    // d_i g_11 = 2 Gamma^k_i1 g_k1
    double dig11 = 0.0;
    for (std::size_t k = 0; k < n; ++k) dig11 += 2.0 * m.gamma(k, i, 0) * m.g(k, 0);
    const double dic = -0.5 * dig11 / (g11 * std::sqrt(g11));
    std::vector<double> v(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) v[k] = c * m.gamma(k, i, 0);
    v[0] += dic;
    const double scale = 1.0 / std::sqrt(m.g(i, i));
    for (auto& comp : v) comp *= scale;
    return v;
}

}  // namespace

std::vector<double> connection_forms(const MetricData& m) {
    const std::vector<double> v = nabla_e1(m, 0);
    std::vector<double> omega;
    for (std::size_t i = 1; i < m.n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < m.n; ++k) acc += v[k] * m.g(k, i);
        omega.push_back(acc / std::sqrt(m.g(i, i)));
    }
    return omega;
}

std::vector<double> e1_covariant_derivatives(const MetricData& m) {
    std::vector<double> out;
    for (std::size_t i = 1; i < m.n; ++i) {
        const std::vector<double> v = nabla_e1(m, i);
        double acc = 0.0;
        for (std::size_t a = 0; a < m.n; ++a)
            for (std::size_t b = 0; b < m.n; ++b) acc += v[a] * m.g(a, b) * v[b];
        out.push_back(std::sqrt(std::max(acc, 0.0)));
    }
    return out;
}

CodazziSample codazzi_at(const ImmersionSampler& sampler, std::span<const double> x, double delta) {
    const Box& box = sampler.domain();
    for (std::size_t k = 0; k < box.dimension(); ++k)
        if (delta > box.extent(k) / 10.0) {
            std::ostringstream msg;
            msg << "codazzi check: differencing step " << delta << " exceeds a tenth of the domain extent "
                << box.extent(k) << " on axis " << k;
            throw std::invalid_argument(msg.str());
        }
    const SampleJet jet = sampler.evaluate(x);
    MetricData m;
    m.n = jet.dimension();
    m.g = induced_metric(jet);
    m.ginv = checked_inverse(m.g);
    m.christoffel = christoffel_projection(jet, m.ginv);
    const SFFData here = second_fundamental_form(jet);
    const std::vector<double> omega = connection_forms(m);
    const std::vector<double> nab = e1_covariant_derivatives(m);

    CodazziSample out;
    std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
    for (std::size_t i = 1; i < m.n; ++i) {
        xp[i] += delta;
        xm[i] -= delta;
        const SFFData sp = second_fundamental_form(sampler, xp);
        const SFFData sm = second_fundamental_form(sampler, xm);
        xp[i] = xm[i] = x[i];
        for (std::size_t c = 0; c < 3; ++c) {
            const double deriv = (sp.lambda[c] - sm.lambda[c]) / (2.0 * delta * std::sqrt(m.g(i, i)));
            out.lambda_relation = std::max(out.lambda_relation, std::abs(deriv - omega[i - 1] * here.lambda[c]));
        }
        out.connection = std::max(out.connection, nab[i - 1]);
    }
    return out;
}

std::vector<double> twisted_christoffel(const TwistProfile& profile, std::span<const double> x) {
    const std::size_t n = profile.dimension();
    const std::vector<double> grad = profile.twist_gradient(x);
    const double f = grad[0];
    std::vector<double> gamma(n * n * n, 0.0);
    auto G = [&](std::size_t k, std::size_t i, std::size_t j) -> double& { return gamma[(k * n + i) * n + j]; };
    G(0, 0, 0) = grad[1] / f;
    for (std::size_t k = 1; k < n; ++k) {
        G(k, 0, 0) = -f * grad[k + 1];
        G(0, 0, k) = G(0, k, 0) = grad[k + 1] / f;
    }
    return gamma;
}

MetricField twisted_metric(const TwistProfile& profile) {
    return [profile](std::span<const double> x) {
        const std::size_t n = profile.dimension();
        Eigen::MatrixXd g = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        const double f = profile.twist(x);
        g(0, 0) = f * f;
        return g;
    };
}

double christoffel_formula_check(const TwistProfile& profile, const std::vector<std::vector<double>>& points,
                                 double h, double f_min) {
    const MetricField metric = twisted_metric(profile);
    double worst = 0.0;
    for (const auto& x : points) {
        const double f = profile.twist(x);
        if (!(f >= f_min)) {
            std::ostringstream msg;
            msg << "christoffel_formula_check: f = " << f << " below f_min = " << f_min;
            throw DomainError(msg.str());
        }
        const auto numeric = christoffel_from_metric(metric, x, h);
        const auto closed = twisted_christoffel(profile, x);
        for (std::size_t r = 0; r < numeric.size(); ++r) worst = std::max(worst, std::abs(numeric[r] - closed[r]));
    }
    return worst;
}

}  // namespace hflat
