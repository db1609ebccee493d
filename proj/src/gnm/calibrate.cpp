#include "gnm/calibrate.hpp"

#include <cmath>
#include <limits>

#include "gnm/nelder_mead.hpp"
#include "gnm/util.hpp"

namespace gnm {

ResponseEvaluator ResponseEvaluator::analytic(std::function<double(double, double)> fn) {
    ResponseEvaluator e;
    e.fn_ = std::move(fn);
    return e;
}

ResponseEvaluator ResponseEvaluator::surrogate(GPModel gp) {
    ResponseEvaluator e;
    e.gp_ = std::move(gp);
    return e;
}

double ResponseEvaluator::operator()(double x, double theta) const {
    if (gp_.has_value()) {
        Eigen::VectorXd q(2);
        q << x, theta;
        return gp_predict(*gp_, q).mean;
    }
    if (!fn_) throw std::logic_error("ResponseEvaluator: evaluator is empty");
    return fn_(x, theta);
}

const GPModel& ResponseEvaluator::surrogate_model() const {
    if (!gp_.has_value()) {
        throw std::logic_error("ResponseEvaluator: no surrogate model present");
    }
    return *gp_;
}

ResponseEvaluator fit_surrogate(const ModelDataset& model, const GPConfig& gp_config) {
    if (model.size() < 4) {
        throw std::invalid_argument("fit_surrogate: need at least 4 model points, got " +
                                    std::to_string(model.size()));
    }
    const Eigen::Index n = static_cast<Eigen::Index>(model.size());
    Eigen::MatrixXd X(n, 2);
    std::vector<double> y(model.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const ModelPoint& p = model[static_cast<std::size_t>(i)];
        X(i, 0) = p.x;
        X(i, 1) = p.theta;
        y[static_cast<std::size_t>(i)] = p.y;
    }
    GPConfig cfg = gp_config;
    cfg.fix_noise_at_floor = true;
    if (cfg.fixed.has_value()) cfg.fixed->noise_variance = kGpNoiseFloor;
    return ResponseEvaluator::surrogate(gp_fit(X, y, cfg));
}

CalibrationModel gnm_fit(const PhysicalDataset& physical, const ModelDataset& model,
                         const GNMConfig& config, ResponseEvaluator evaluator) {
    const LayeredGraph graph =
        build_graph(physical, model, config.lambda, config.terminal_response);
    AnchorPath path = shortest_anchor_path(graph);

    std::vector<double> xs(path.anchors.size());
    std::vector<double> thetas(path.anchors.size());
    std::vector<AnchorRecord> records(path.anchors.size());
    for (std::size_t j = 0; j < path.anchors.size(); ++j) {
        const ModelPoint& p = model[path.anchors[j]];
        xs[j] = p.x;
        thetas[j] = p.theta;
        records[j] = AnchorRecord{j + 1, path.anchors[j], p.x, p.theta, p.y};
    }

    CalibrationModel cal;
    cal.calib_fn = gp_fit(xs, thetas, config.gp);
    cal.anchors = std::move(path);
    cal.anchor_points = std::move(records);
    cal.evaluator = std::move(evaluator);
    cal.lambda = config.lambda;
    return cal;
}

double predict_theta(const CalibrationModel& cal, double x) {
    return gp_predict(cal.calib_fn, x).mean;
}

double predict_response(const CalibrationModel& cal, double x) {
    return cal.evaluator(x, predict_theta(cal, x));
}

double pfc_objective(const PhysicalDataset& physical, const ResponseEvaluator& evaluator,
                     double alpha, double beta) {
    double sum = 0.0;
    for (const auto& p : physical.points()) {
        double value;
        try {
            value = evaluator(p.x, alpha * std::exp(-beta * p.x));
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
        if (!std::isfinite(value)) return std::numeric_limits<double>::infinity();
        const double r = p.y - value;
        sum += r * r;
    }
    return sum;
}

std::vector<std::pair<double, double>> pfc_starting_points(const PhysicalDataset& physical,
                                                           Interval theta_range,
                                                           std::uint64_t seed) {
    const double alpha0 = 0.5 * (theta_range.lo + theta_range.hi);
    const double x_spread = physical.points().back().x - physical.points().front().x;
    const double beta_scale = 1.0 / x_spread;

    std::vector<std::pair<double, double>> starts{{alpha0, 0.0}};
    SplitMix64 rng(derive_seed(seed, 0x7066u));  // pfc start stream
    for (int s = 1; s < 5; ++s) {
        const double a = alpha0 * std::exp(rng.uniform(-0.7, 0.7));
        const double b = rng.uniform(-2.0 * beta_scale, 2.0 * beta_scale);
        starts.emplace_back(a, b);
    }
    return starts;
}

PFCModel pfc_fit(const PhysicalDataset& physical, const ResponseEvaluator& evaluator,
                 Interval theta_range, std::uint64_t seed) {
    const auto starts = pfc_starting_points(physical, theta_range, seed);
    const double alpha0 = starts.front().first;
    const double x_spread = physical.points().back().x - physical.points().front().x;

    auto objective = [&](const std::vector<double>& p) {
        return pfc_objective(physical, evaluator, p[0], p[1]);
    };

    NelderMeadOptions nm;
    nm.max_iterations = 600;
    nm.f_tolerance = 1e-12;
    const std::vector<double> step{0.25 * std::abs(alpha0) + 0.05, 0.5 / x_spread};

    PFCModel best;
    best.objective = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : starts) {
        auto r = nelder_mead(objective, {a, b}, step, nm);
        if (r.fx < best.objective) {
            best.objective = r.fx;
            best.alpha = r.x[0];
            best.beta = r.x[1];
        }
    }
    if (!std::isfinite(best.objective)) {
        throw std::runtime_error("pfc_fit: objective non-finite at every start");
    }
    best.evaluator = evaluator;
    return best;
}

double pfc_theta(const PFCModel& model, double x) {
    return model.alpha * std::exp(-model.beta * x);
}

double pfc_predict(const PFCModel& model, double x) {
    return model.evaluator(x, pfc_theta(model, x));
}

}  // namespace gnm
