#include "gnm/gp.hpp"

#include <algorithm>
#include <cmath>

#include "gnm/nelder_mead.hpp"
#include "gnm/util.hpp"

namespace gnm {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-6;

void check_hyper(const Eigen::MatrixXd& X, const GPHyper& h) {
    if (static_cast<std::size_t>(X.cols()) != h.length_scales.size()) {
        throw std::invalid_argument("GP hyperparameters: expected one length-scale per dimension");
    }
    if (!(h.signal_variance > 0.0)) {
        throw std::invalid_argument("GP hyperparameters: signal_variance must be positive");
    }
    for (double ls : h.length_scales) {
        if (!(ls > 0.0)) {
            throw std::invalid_argument("GP hyperparameters: length-scales must be positive");
        }
    }
    if (!(h.noise_variance >= 0.0)) {
        throw std::invalid_argument("GP hyperparameters: noise_variance must be >= 0");
    }
}

// Cholesky with progressive jitter. Jitter scales with the mean kernel
// diagonal; returns the factor and the jitter that made it succeed.
struct Factorization {
    Eigen::MatrixXd L;
    double jitter = 0.0;
};

Factorization factorize(const Eigen::MatrixXd& Kn) {
    const double diag_scale = Kn.diagonal().mean();
    double jitter = 0.0;
    for (;;) {
        Eigen::MatrixXd M = Kn;
        if (jitter > 0.0) M.diagonal().array() += jitter * diag_scale;
        Eigen::LLT<Eigen::MatrixXd> llt(M);
        if (llt.info() == Eigen::Success) {
            return Factorization{Eigen::MatrixXd(llt.matrixL()), jitter * diag_scale};
        }
        if (jitter == 0.0) {
            jitter = kJitterStart;
        } else if (jitter < kJitterMax) {
            jitter = std::min(jitter * 10.0, kJitterMax);
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kn, Eigen::EigenvaluesOnly);
            throw GPConditioningError(es.eigenvalues().minCoeff());
        }
    }
}

// (L L^T)^-1 b via two triangular solves.
template <typename Rhs>
auto chol_solve(const Eigen::MatrixXd& L, const Rhs& b) {
    auto t = L.triangularView<Eigen::Lower>().solve(b).eval();
    return L.transpose().triangularView<Eigen::Upper>().solve(t).eval();
}

double lml_from_factor(const Eigen::MatrixXd& L, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& alpha) {
    const double n = static_cast<double>(y.size());
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < L.rows(); ++i) log_det += std::log(L(i, i));
    return -0.5 * y.dot(alpha) - log_det - 0.5 * n * std::log(kTwoPi);
}

struct Standardization {
    Eigen::VectorXd in_mean;
    Eigen::VectorXd in_scale;
    double t_mean = 0.0;
    double t_scale = 1.0;
};

Standardization standardize(Eigen::MatrixXd& X, Eigen::VectorXd& y) {
    Standardization s;
    const double n = static_cast<double>(X.rows());
    s.in_mean = X.colwise().mean();
    s.in_scale.resize(X.cols());
    for (Eigen::Index d = 0; d < X.cols(); ++d) {
        const double var = (X.col(d).array() - s.in_mean(d)).square().sum() / n;
        const double sd = std::sqrt(var);
        s.in_scale(d) = sd > 1e-12 ? sd : 1.0;
        X.col(d) = (X.col(d).array() - s.in_mean(d)) / s.in_scale(d);
    }
    s.t_mean = y.mean();
    const double tvar = (y.array() - s.t_mean).square().sum() / n;
    const double tsd = std::sqrt(tvar);
    s.t_scale = tsd > 1e-12 ? tsd : 1.0;
    y = (y.array() - s.t_mean) / s.t_scale;
    return s;
}

// Median of nonzero pairwise distances per dimension; 1.0 when degenerate.
GPHyper heuristic_hyper(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    GPHyper h;
    const Eigen::Index n = X.rows();
    h.length_scales.resize(static_cast<std::size_t>(X.cols()), 1.0);
    for (Eigen::Index d = 0; d < X.cols(); ++d) {
        std::vector<double> dists;
        dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                double r = std::abs(X(i, d) - X(j, d));
                if (r > 0.0) dists.push_back(r);
            }
        }
        if (!dists.empty()) {
            std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
            h.length_scales[static_cast<std::size_t>(d)] = dists[dists.size() / 2];
        }
    }
    const double var = (y.array() - y.mean()).square().sum() / static_cast<double>(n);
    h.signal_variance = std::max(var, 1e-4);
    h.noise_variance = std::max(1e-4 * h.signal_variance, kGpNoiseFloor);
    return h;
}

// Log-space parameter vector <-> hyperparameters, with box clamps that keep
// the simplex away from degenerate factorizations. When the noise is pinned
// at the floor it is excluded from the parameter vector.
std::vector<double> to_log(const GPHyper& h, bool fix_noise) {
    std::vector<double> p;
    p.push_back(std::log(h.signal_variance));
    for (double ls : h.length_scales) p.push_back(std::log(ls));
    if (!fix_noise) p.push_back(std::log(std::max(h.noise_variance, kGpNoiseFloor)));
    return p;
}

GPHyper from_log(const std::vector<double>& p, std::size_t dims, bool fix_noise) {
    auto clamp = [](double v, double lo, double hi) { return std::min(std::max(v, lo), hi); };
    GPHyper h;
    h.signal_variance = std::exp(clamp(p[0], std::log(1e-6), std::log(1e6)));
    h.length_scales.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        h.length_scales[d] = std::exp(clamp(p[1 + d], std::log(1e-3), std::log(1e3)));
    }
    h.noise_variance = fix_noise
        ? kGpNoiseFloor
        : std::exp(clamp(p[1 + dims], std::log(kGpNoiseFloor), std::log(1e2)));
    return h;
}

GPHyper optimize_hyper(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const GPConfig& cfg) {
    const std::size_t dims = static_cast<std::size_t>(X.cols());
    const bool fix_noise = cfg.fix_noise_at_floor;
    GPHyper h0 = heuristic_hyper(X, y);
    if (fix_noise) h0.noise_variance = kGpNoiseFloor;

    auto objective = [&](const std::vector<double>& p) -> double {
        try {
            return -log_marginal_likelihood(X, y, from_log(p, dims, fix_noise));
        } catch (const GPConditioningError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const std::vector<double> p0 = to_log(h0, fix_noise);
    std::vector<std::vector<double>> starts{p0};
    SplitMix64 rng(derive_seed(cfg.seed, 0x6f70u));  // hyperparameter start stream
    for (int s = 1; s < 5; ++s) {
        std::vector<double> p = p0;
        for (double& v : p) v += rng.uniform(-1.5, 1.5);
        starts.push_back(std::move(p));
    }

    NelderMeadOptions nm;
    nm.max_iterations = cfg.max_iterations;
    nm.f_tolerance = 1e-9;

    std::vector<double> best = p0;
    double best_f = objective(p0);
    const std::vector<double> step(p0.size(), 0.3);
    for (const auto& start : starts) {
        auto r = nelder_mead(objective, start, step, nm);
        if (r.fx < best_f) {
            best_f = r.fx;
            best = r.x;
        }
    }
    // All starts non-finite: fall back to the heuristic.
    if (!std::isfinite(best_f)) return h0;
    return from_log(best, dims, fix_noise);
}

}  // namespace

GPConditioningError::GPConditioningError(double min_eigenvalue)
    : std::runtime_error("GP kernel matrix could not be factorized at maximum jitter; "
                         "smallest eigenvalue estimate " +
                         format_g17(min_eigenvalue)),
      min_eigenvalue_(min_eigenvalue) {}

Eigen::MatrixXd se_kernel_matrix(const Eigen::MatrixXd& X, const GPHyper& h) {
    check_hyper(X, h);
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = h.signal_variance;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double q = 0.0;
            for (Eigen::Index d = 0; d < X.cols(); ++d) {
                const double r = (X(i, d) - X(j, d)) / h.length_scales[static_cast<std::size_t>(d)];
                q += r * r;
            }
            K(i, j) = K(j, i) = h.signal_variance * std::exp(-0.5 * q);
        }
    }
    return K;
}

double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const GPHyper& h) {
    Eigen::MatrixXd Kn = se_kernel_matrix(X, h);
    Kn.diagonal().array() += h.noise_variance;
    const Factorization f = factorize(Kn);
    const Eigen::VectorXd alpha = chol_solve(f.L, y);
    return lml_from_factor(f.L, y, alpha);
}

std::vector<double> log_marginal_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                          const GPHyper& h) {
    const Eigen::Index n = X.rows();
    const std::size_t dims = static_cast<std::size_t>(X.cols());

    const Eigen::MatrixXd K = se_kernel_matrix(X, h);
    Eigen::MatrixXd Kn = K;
    Kn.diagonal().array() += h.noise_variance;
    const Factorization f = factorize(Kn);
    const Eigen::VectorXd alpha = chol_solve(f.L, y);
    const Eigen::MatrixXd Kinv = chol_solve(f.L, Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n)));

    // dLML/dp = 0.5 tr((alpha alpha^T - Kn^-1) dKn/dp), in log-parameter form.
    const Eigen::MatrixXd A = alpha * alpha.transpose() - Kinv;

    std::vector<double> grad;
    grad.reserve(dims + 2);
    grad.push_back(0.5 * A.cwiseProduct(K).sum());  // dKn/dlog sv = K
    for (std::size_t d = 0; d < dims; ++d) {
        const double ls = h.length_scales[d];
        Eigen::MatrixXd dK(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const double r = (X(i, static_cast<Eigen::Index>(d)) -
                                  X(j, static_cast<Eigen::Index>(d))) / ls;
                dK(i, j) = K(i, j) * r * r;  // dKn/dlog ls_d
            }
        }
        grad.push_back(0.5 * A.cwiseProduct(dK).sum());
    }
    grad.push_back(0.5 * h.noise_variance * A.trace());  // dKn/dlog noise = noise I
    return grad;
}

GPModel gp_fit(const Eigen::MatrixXd& inputs, const std::vector<double>& targets,
               const GPConfig& cfg) {
    if (inputs.rows() < 2) {
        throw std::invalid_argument("gp_fit: need at least 2 points");
    }
    if (inputs.cols() < 1 || inputs.cols() > 2) {
        throw std::invalid_argument("gp_fit: input dimension must be 1 or 2");
    }
    if (static_cast<std::size_t>(inputs.rows()) != targets.size()) {
        throw std::invalid_argument("gp_fit: inputs/targets size mismatch");
    }

    GPModel m;
    m.inputs = inputs;
    m.targets = Eigen::Map<const Eigen::VectorXd>(targets.data(),
                                                  static_cast<Eigen::Index>(targets.size()));
    const Standardization s = standardize(m.inputs, m.targets);
    m.input_mean = s.in_mean;
    m.input_scale = s.in_scale;
    m.target_mean = s.t_mean;
    m.target_scale = s.t_scale;

    if (cfg.optimize) {
        m.hyper = optimize_hyper(m.inputs, m.targets, cfg);
    } else if (cfg.fixed.has_value()) {
        m.hyper = *cfg.fixed;
        m.hyper.noise_variance = std::max(m.hyper.noise_variance, kGpNoiseFloor);
        check_hyper(m.inputs, m.hyper);
    } else {
        m.hyper = heuristic_hyper(m.inputs, m.targets);
    }

    Eigen::MatrixXd Kn = se_kernel_matrix(m.inputs, m.hyper);
    Kn.diagonal().array() += m.hyper.noise_variance;
    Factorization f = factorize(Kn);
    m.chol = std::move(f.L);
    m.jitter = f.jitter;
    m.weights = chol_solve(m.chol, m.targets);
    m.log_marginal = lml_from_factor(m.chol, m.targets, m.weights);
    return m;
}

GPModel gp_fit(const std::vector<double>& xs, const std::vector<double>& ys,
               const GPConfig& cfg) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(xs.size()), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) X(static_cast<Eigen::Index>(i), 0) = xs[i];
    return gp_fit(X, ys, cfg);
}

GPPrediction gp_predict(const GPModel& model, const Eigen::VectorXd& query) {
    if (query.size() != model.inputs.cols()) {
        throw std::invalid_argument("gp_predict: query dimension mismatch");
    }
    const Eigen::Index n = model.inputs.rows();
    Eigen::VectorXd q(query.size());
    for (Eigen::Index d = 0; d < query.size(); ++d) {
        q(d) = (query(d) - model.input_mean(d)) / model.input_scale(d);
    }

    Eigen::VectorXd kstar(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double dist2 = 0.0;
        for (Eigen::Index d = 0; d < q.size(); ++d) {
            const double r = (model.inputs(i, d) - q(d)) /
                             model.hyper.length_scales[static_cast<std::size_t>(d)];
            dist2 += r * r;
        }
        kstar(i) = model.hyper.signal_variance * std::exp(-0.5 * dist2);
    }

    const Eigen::VectorXd v = model.chol.triangularView<Eigen::Lower>().solve(kstar);
    GPPrediction out;
    out.mean = kstar.dot(model.weights) * model.target_scale + model.target_mean;
    const double var_std = model.hyper.signal_variance - v.squaredNorm();
    out.variance = std::max(var_std, 0.0) * model.target_scale * model.target_scale;
    return out;
}

GPPrediction gp_predict(const GPModel& model, double x) {
    Eigen::VectorXd q(1);
    q(0) = x;
    return gp_predict(model, q);
}

}  // namespace gnm
