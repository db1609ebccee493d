#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "gnm/dataset.hpp"
#include "gnm/gp.hpp"
#include "gnm/graph.hpp"
#include "gnm/shortest_path.hpp"

namespace gnm {

// Evaluates the computational model response at (x, theta): either a
// closed-form function or a GP surrogate fitted to scattered model points.
class ResponseEvaluator {
public:
    static ResponseEvaluator analytic(std::function<double(double, double)> fn);
    static ResponseEvaluator surrogate(GPModel gp);

    ResponseEvaluator() = default;  // empty; evaluating throws

    double operator()(double x, double theta) const;
    bool is_surrogate() const { return gp_.has_value(); }
    const GPModel& surrogate_model() const;

private:
    std::function<double(double, double)> fn_;
    std::optional<GPModel> gp_;
};

// 2-d interpolating GP over (x, theta) -> y; needs at least 4 model points.
// Noise is pinned at the floor so the surrogate reproduces its training
// responses.
ResponseEvaluator fit_surrogate(const ModelDataset& model, const GPConfig& gp_config);

struct AnchorRecord {
    std::size_t cluster = 0;  // 1-based, matching C_1..C_m
    std::size_t model_index = 0;
    double x = 0.0;
    double theta = 0.0;
    double y = 0.0;
};

struct GNMConfig {
    double lambda = 0.4;
    GPConfig gp;
    bool terminal_response = false;
};

// The fitted calibration: anchors selected by the shortest path and the GP
// calibration function x -> theta fitted through them.
struct CalibrationModel {
    GPModel calib_fn;
    AnchorPath anchors;
    std::vector<AnchorRecord> anchor_points;
    ResponseEvaluator evaluator;
    double lambda = 0.0;
};

// build graph -> shortest path -> GP through the anchor (x, theta) pairs.
CalibrationModel gnm_fit(const PhysicalDataset& physical, const ModelDataset& model,
                         const GNMConfig& config, ResponseEvaluator evaluator);

double predict_theta(const CalibrationModel& cal, double x);

// The prediction rule: response at x is the evaluator at (x, predicted
// theta).
double predict_response(const CalibrationModel& cal, double x);

// Parametric baseline theta = alpha * exp(-beta x), fitted by simplex
// search on the squared response discrepancy.
struct PFCModel {
    double alpha = 0.0;
    double beta = 0.0;
    double objective = 0.0;
    ResponseEvaluator evaluator;
};

// Sum of squared discrepancies between physical responses and evaluator
// responses at theta = alpha exp(-beta x). Non-finite or throwing
// evaluations yield +inf.
double pfc_objective(const PhysicalDataset& physical, const ResponseEvaluator& evaluator,
                     double alpha, double beta);

// The 5 deterministic starts: (midpoint of theta_range, 0) plus four seeded
// perturbations scaled by the data ranges.
std::vector<std::pair<double, double>> pfc_starting_points(const PhysicalDataset& physical,
                                                           Interval theta_range,
                                                           std::uint64_t seed);

PFCModel pfc_fit(const PhysicalDataset& physical, const ResponseEvaluator& evaluator,
                 Interval theta_range, std::uint64_t seed);

double pfc_theta(const PFCModel& model, double x);
double pfc_predict(const PFCModel& model, double x);

}  // namespace gnm
