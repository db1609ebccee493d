#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gnm {

// Squared-exponential hyperparameters with one length-scale per input
// dimension. Variances, not standard deviations.
struct GPHyper {
    double signal_variance = 1.0;
    std::vector<double> length_scales;
    double noise_variance = 1e-4;
};

constexpr double kGpNoiseFloor = 1e-8;

struct GPConfig {
    bool optimize = true;
    // Used when optimize is false; interpreted on the standardized scale.
    // Absent means the median-distance heuristic.
    std::optional<GPHyper> fixed;
    // Pin noise_variance to the floor instead of learning it; this is what
    // makes a surrogate interpolate its training data.
    bool fix_noise_at_floor = false;
    std::uint64_t seed = 0;
    int max_iterations = 200;  // simplex iterations per start
};

// K + noise*I could not be factorized even at the maximum jitter.
class GPConditioningError : public std::runtime_error {
public:
    GPConditioningError(double min_eigenvalue);
    double min_eigenvalue() const { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

// Fitted model. Inputs and targets are stored standardized (per-dimension
// input mean/scale, target mean/scale); hyperparameters live on that scale.
struct GPModel {
    Eigen::MatrixXd inputs;  // n x d, standardized
    Eigen::VectorXd targets;  // standardized
    GPHyper hyper;
    Eigen::MatrixXd chol;     // lower-triangular L, L L^T = K + noise I (+ jitter)
    Eigen::VectorXd weights;  // alpha = (K + noise I)^-1 targets
    Eigen::VectorXd input_mean;
    Eigen::VectorXd input_scale;
    double target_mean = 0.0;
    double target_scale = 1.0;
    double jitter = 0.0;  // applied on top of noise_variance, if any
    double log_marginal = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(inputs.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(inputs.cols()); }
};

struct GPPrediction {
    double mean = 0.0;
    double variance = 0.0;
};

// inputs is n x d (d in {1, 2} here), targets length n. With cfg.optimize
// the hyperparameters maximize the log marginal likelihood via a simplex
// search from 5 seeded starts around the median-distance heuristic.
GPModel gp_fit(const Eigen::MatrixXd& inputs, const std::vector<double>& targets,
               const GPConfig& cfg = {});
GPModel gp_fit(const std::vector<double>& xs, const std::vector<double>& ys,
               const GPConfig& cfg = {});

GPPrediction gp_predict(const GPModel& model, const Eigen::VectorXd& query);
GPPrediction gp_predict(const GPModel& model, double x);

// Noiseless SE kernel matrix.
Eigen::MatrixXd se_kernel_matrix(const Eigen::MatrixXd& X, const GPHyper& h);

// Log marginal likelihood of (X, y) under the SE kernel plus noise, and its
// gradient with respect to the log-parameters, ordered (log signal_variance,
// log length_scale_1.., log noise_variance). Exposed for the finite
// difference checks; operates directly on the given data, no
// standardization.
double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const GPHyper& h);
std::vector<double> log_marginal_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                          const GPHyper& h);

}  // namespace gnm
