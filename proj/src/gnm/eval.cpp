#include "gnm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gnm/util.hpp"

namespace gnm {

namespace {

MetricReport sum_of_squares_metric(const std::vector<double>& predicted,
                                   const std::vector<double>& actual) {
    if (predicted.size() != actual.size()) {
        throw std::invalid_argument("metric: predicted/actual length mismatch (" +
                                    std::to_string(predicted.size()) + " vs " +
                                    std::to_string(actual.size()) + ")");
    }
    if (predicted.empty()) {
        throw std::invalid_argument("metric: empty input");
    }
    MetricReport r;
    r.n_points = predicted.size();
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double e = predicted[i] - actual[i];
        r.paper_rmse += e * e;
    }
    r.conventional_rmse = std::sqrt(r.paper_rmse / static_cast<double>(r.n_points));
    return r;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
    const double mu = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

MetricReport metric_response(const std::vector<double>& predicted,
                             const std::vector<double>& actual) {
    return sum_of_squares_metric(predicted, actual);
}

MetricReport metric_theta(const std::vector<double>& predicted_theta,
                          const std::vector<double>& actual_theta) {
    return sum_of_squares_metric(predicted_theta, actual_theta);
}

FoldPlan kfold(const PhysicalDataset& physical, int k, std::uint64_t seed) {
    const std::size_t m = physical.size();
    if (k < 2) throw std::invalid_argument("kfold: k must be >= 2");
    if (static_cast<std::size_t>(k) > m) {
        throw std::invalid_argument("kfold: k = " + std::to_string(k) +
                                    " exceeds the number of physical points " +
                                    std::to_string(m));
    }
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    SplitMix64 rng(derive_seed(seed, 0x6bu));
    for (std::size_t i = m; i > 1; --i) {
        std::swap(perm[i - 1], perm[rng.below(i)]);
    }
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        plan.assignments[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
    return plan;
}

PhysicalDataset fold_train_subset(const PhysicalDataset& physical, const FoldPlan& plan,
                                  int held_out_fold) {
    std::vector<PhysicalPoint> pts;
    pts.reserve(physical.size());
    for (std::size_t j = 0; j < physical.size(); ++j) {
        if (plan.assignments[j] != held_out_fold) pts.push_back(physical[j]);
    }
    return PhysicalDataset::from_points(std::move(pts));
}

std::vector<std::size_t> fold_test_indices(const FoldPlan& plan, int held_out_fold) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < plan.assignments.size(); ++j) {
        if (plan.assignments[j] == held_out_fold) idx.push_back(j);
    }
    return idx;
}

namespace {

// Held-out predictions for a GNM fit on one fold. The graph and anchors are
// rebuilt from the training physical points only; the model dataset is
// never split.
struct FoldMetrics {
    MetricReport response;
    std::optional<MetricReport> theta;
};

FoldMetrics eval_gnm_fold(const PhysicalDataset& physical, const ModelDataset& model,
                          const FoldPlan& plan, int fold, const GNMConfig& config,
                          const ResponseEvaluator& evaluator,
                          const std::function<double(double)>* true_theta) {
    const PhysicalDataset train = fold_train_subset(physical, plan, fold);
    const CalibrationModel cal = gnm_fit(train, model, config, evaluator);

    std::vector<double> pred_y, actual_y, pred_t, actual_t;
    for (std::size_t j : fold_test_indices(plan, fold)) {
        const double x = physical[j].x;
        pred_y.push_back(predict_response(cal, x));
        actual_y.push_back(physical[j].y);
        if (true_theta) {
            pred_t.push_back(predict_theta(cal, x));
            actual_t.push_back((*true_theta)(x));
        }
    }
    FoldMetrics out;
    out.response = metric_response(pred_y, actual_y);
    if (true_theta) out.theta = metric_theta(pred_t, actual_t);
    return out;
}

FoldMetrics eval_pfc_fold(const PhysicalDataset& physical, const FoldPlan& plan, int fold,
                          const ResponseEvaluator& evaluator, Interval theta_range,
                          std::uint64_t seed,
                          const std::function<double(double)>* true_theta) {
    const PhysicalDataset train = fold_train_subset(physical, plan, fold);
    const PFCModel pfc = pfc_fit(train, evaluator, theta_range, seed);

    std::vector<double> pred_y, actual_y, pred_t, actual_t;
    for (std::size_t j : fold_test_indices(plan, fold)) {
        const double x = physical[j].x;
        pred_y.push_back(pfc_predict(pfc, x));
        actual_y.push_back(physical[j].y);
        if (true_theta) {
            pred_t.push_back(pfc_theta(pfc, x));
            actual_t.push_back((*true_theta)(x));
        }
    }
    FoldMetrics out;
    out.response = metric_response(pred_y, actual_y);
    if (true_theta) out.theta = metric_theta(pred_t, actual_t);
    return out;
}

}  // namespace

LambdaSelection select_lambda(const PhysicalDataset& physical, const ModelDataset& model,
                              const std::vector<double>& grid, const GPConfig& gp_config,
                              const ResponseEvaluator& evaluator, std::uint64_t seed,
                              bool terminal_response) {
    if (grid.empty()) throw std::invalid_argument("select_lambda: empty grid");
    std::vector<double> lambdas = grid;
    std::sort(lambdas.begin(), lambdas.end());
    for (double l : lambdas) {
        if (!(l >= 0.0)) throw std::invalid_argument("select_lambda: negative lambda in grid");
    }

    const FoldPlan plan = kfold(physical, 2, derive_seed(seed, 0x01u));
    GPConfig gp = gp_config;
    gp.seed = derive_seed(seed, 0x02u);

    const std::size_t n_lambda = lambdas.size();
    // score slot per (lambda, fold); NaN marks a failed fit
    std::vector<double> slot(n_lambda * 2, std::numeric_limits<double>::quiet_NaN());
    std::string first_error;

    parallel_for(n_lambda * 2, [&](std::size_t task) {
        const std::size_t li = task / 2;
        const int fold = static_cast<int>(task % 2);
        GNMConfig cfg;
        cfg.lambda = lambdas[li];
        cfg.gp = gp;
        cfg.terminal_response = terminal_response;
        try {
            const FoldMetrics fm =
                eval_gnm_fold(physical, model, plan, fold, cfg, evaluator, nullptr);
            slot[task] = fm.response.conventional_rmse;
        } catch (const std::exception& e) {
            if (first_error.empty()) first_error = e.what();
        }
    });

    LambdaSelection sel;
    sel.scores.reserve(n_lambda);
    bool any_ok = false;
    for (std::size_t li = 0; li < n_lambda; ++li) {
        LambdaScore s;
        s.lambda = lambdas[li];
        double sum = 0.0;
        for (int f = 0; f < 2; ++f) {
            const double v = slot[li * 2 + static_cast<std::size_t>(f)];
            if (!std::isnan(v)) {
                sum += v;
                ++s.folds_ok;
            }
        }
        s.mean_rmse = s.folds_ok > 0 ? sum / static_cast<double>(s.folds_ok)
                                     : std::numeric_limits<double>::quiet_NaN();
        any_ok = any_ok || s.folds_ok > 0;
        sel.scores.push_back(s);
    }
    if (!any_ok) {
        throw std::runtime_error("select_lambda: every grid value failed on both folds (" +
                                 first_error + ")");
    }

    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : sel.scores) {
        if (s.folds_ok > 0 && s.mean_rmse < best) {
            best = s.mean_rmse;
            sel.lambda_star = s.lambda;
        }
    }
    return sel;
}

SweepResult sweep_lambda(const PhysicalDataset& physical, const ModelDataset& model,
                         const std::vector<double>& grid, const GPConfig& gp_config,
                         const ResponseEvaluator& evaluator, std::uint64_t seed,
                         double split_ratio, bool terminal_response) {
    if (grid.empty()) throw std::invalid_argument("sweep_lambda: empty grid");
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
        throw std::invalid_argument("sweep_lambda: split_ratio must be in (0, 1)");
    }
    std::vector<double> lambdas = grid;
    std::sort(lambdas.begin(), lambdas.end());

    // One random train/test partition of the physical points.
    const std::size_t m = physical.size();
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    SplitMix64 rng(derive_seed(seed, 0x73u));
    for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

    std::size_t n_train = static_cast<std::size_t>(std::llround(split_ratio * static_cast<double>(m)));
    n_train = std::min(std::max<std::size_t>(n_train, 2), m - 1);

    std::vector<bool> in_train(m, false);
    for (std::size_t i = 0; i < n_train; ++i) in_train[perm[i]] = true;

    std::vector<PhysicalPoint> train_pts;
    std::vector<std::size_t> test_idx;
    for (std::size_t j = 0; j < m; ++j) {
        if (in_train[j]) {
            train_pts.push_back(physical[j]);
        } else {
            test_idx.push_back(j);
        }
    }
    const PhysicalDataset train = PhysicalDataset::from_points(std::move(train_pts));

    GPConfig gp = gp_config;
    gp.seed = derive_seed(seed, 0x74u);

    const std::size_t n_lambda = lambdas.size();
    std::vector<SweepRow> slot(n_lambda);
    std::vector<char> ok(n_lambda, 0);
    std::string first_error;

    parallel_for(n_lambda, [&](std::size_t li) {
        GNMConfig cfg;
        cfg.lambda = lambdas[li];
        cfg.gp = gp;
        cfg.terminal_response = terminal_response;
        try {
            const CalibrationModel cal = gnm_fit(train, model, cfg, evaluator);
            std::vector<double> pred, actual;
            for (std::size_t j : test_idx) {
                pred.push_back(predict_response(cal, physical[j].x));
                actual.push_back(physical[j].y);
            }
            const MetricReport r = metric_response(pred, actual);
            slot[li] = SweepRow{lambdas[li], r.conventional_rmse, r.paper_rmse, 0.0};
            ok[li] = 1;
        } catch (const std::exception& e) {
            if (first_error.empty()) first_error = e.what();
        }
    });

    SweepResult result;
    for (std::size_t li = 0; li < n_lambda; ++li) {
        if (ok[li]) result.rows.push_back(slot[li]);
    }
    if (result.rows.empty()) {
        throw std::runtime_error("sweep_lambda: every grid value failed (" + first_error + ")");
    }
    return result;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(static_cast<double>(i) * 0.05);
    return grid;
}

namespace {

struct PhaseMetrics {
    double rmse_mean = 0.0, rmse_std = 0.0;
    std::optional<double> theta_mean, theta_std;
};

PhaseMetrics reduce_folds(const std::vector<FoldMetrics>& folds) {
    PhaseMetrics out;
    std::vector<double> rmse, theta;
    for (const auto& f : folds) {
        rmse.push_back(f.response.paper_rmse);
        if (f.theta.has_value()) theta.push_back(f.theta->paper_rmse);
    }
    out.rmse_mean = mean_of(rmse);
    out.rmse_std = stddev_of(rmse);
    if (!theta.empty()) {
        out.theta_mean = mean_of(theta);
        out.theta_std = stddev_of(theta);
    }
    return out;
}

void push_rows(std::vector<ReportRow>& rows, const std::string& dataset,
               const std::string& method, const PhaseMetrics& train,
               const PhaseMetrics& test) {
    rows.push_back({dataset, method, "rmse", "train", train.rmse_mean, train.rmse_std});
    if (train.theta_mean.has_value()) {
        rows.push_back({dataset, method, "rmse_theta", "train", *train.theta_mean,
                        train.theta_std.value_or(0.0)});
    }
    rows.push_back({dataset, method, "rmse", "test", test.rmse_mean, test.rmse_std});
    if (test.theta_mean.has_value()) {
        rows.push_back({dataset, method, "rmse_theta", "test", *test.theta_mean,
                        test.theta_std.value_or(0.0)});
    }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
    const bool builtin = config.truth.has_value();
    if (!builtin && (!config.physical.has_value() || !config.model.has_value())) {
        throw std::invalid_argument("run_experiment: need either a synthetic truth or CSV data");
    }

    // Training-phase data, and test-phase data: a fresh, larger synthetic
    // draw, or the same CSV data cross-validated.
    auto train_pair = builtin
        ? generate_synthetic(*config.truth, config.train_m, config.train_n, config.x_range,
                             config.theta_range, derive_seed(config.seed, 11))
        : std::make_pair(*config.physical, *config.model);
    const PhysicalDataset& phys_train = train_pair.first;
    const ModelDataset& model_train = train_pair.second;

    auto test_pair = builtin
        ? generate_synthetic(*config.truth, config.test_m, config.test_n, config.x_range,
                             config.theta_range, derive_seed(config.seed, 12))
        : train_pair;
    const PhysicalDataset& phys_test = test_pair.first;
    const ModelDataset& model_test = test_pair.second;

    const ResponseEvaluator evaluator = [&] {
        if (builtin) return ResponseEvaluator::analytic(config.truth->model_response);
        GPConfig gp = config.gp;
        gp.seed = derive_seed(config.seed, 13);
        return fit_surrogate(model_train, gp);
    }();

    const Interval theta_range = [&] {
        if (builtin) return config.theta_range;
        double lo = model_train[0].theta, hi = lo;
        for (const auto& p : model_train.points()) {
            lo = std::min(lo, p.theta);
            hi = std::max(hi, p.theta);
        }
        return Interval{lo, hi};
    }();

    const std::function<double(double)> truth_theta_fn =
        builtin ? config.truth->true_theta : std::function<double(double)>{};
    const std::function<double(double)>* truth_theta = builtin ? &truth_theta_fn : nullptr;

    ExperimentReport report;

    // Regularization weight: fixed, or 2-fold CV on the training-phase data.
    double lambda = config.lambda;
    if (config.lambda_cv) {
        const auto grid = config.lambda_grid.empty() ? default_lambda_grid() : config.lambda_grid;
        auto sel = select_lambda(phys_train, model_train, grid, config.gp, evaluator,
                                 derive_seed(config.seed, 14), config.terminal_response);
        lambda = sel.lambda_star;
        report.lambda_selection = std::move(sel);
    }
    report.lambda_used = lambda;

    GNMConfig gnm_cfg;
    gnm_cfg.lambda = lambda;
    gnm_cfg.gp = config.gp;
    gnm_cfg.gp.seed = derive_seed(config.seed, 15);
    gnm_cfg.terminal_response = config.terminal_response;

    const FoldPlan test_plan = kfold(phys_test, config.cv_folds, derive_seed(config.seed, 16));

    for (Method method : config.methods) {
        PhaseMetrics train_metrics, test_metrics;

        if (method == Method::gnm) {
            // Training error: fit on everything, score on the training inputs.
            const CalibrationModel cal = gnm_fit(phys_train, model_train, gnm_cfg, evaluator);
            std::vector<double> pred_y, actual_y, pred_t, actual_t;
            for (const auto& p : phys_train.points()) {
                pred_y.push_back(predict_response(cal, p.x));
                actual_y.push_back(p.y);
                if (truth_theta) {
                    pred_t.push_back(predict_theta(cal, p.x));
                    actual_t.push_back((*truth_theta)(p.x));
                }
            }
            FoldMetrics fm;
            fm.response = metric_response(pred_y, actual_y);
            if (truth_theta) fm.theta = metric_theta(pred_t, actual_t);
            train_metrics = reduce_folds({fm});

            std::vector<FoldMetrics> folds;
            for (int f = 0; f < config.cv_folds; ++f) {
                folds.push_back(eval_gnm_fold(phys_test, model_test, test_plan, f, gnm_cfg,
                                              evaluator, truth_theta));
            }
            test_metrics = reduce_folds(folds);
        } else {
            const PFCModel pfc = pfc_fit(phys_train, evaluator, theta_range,
                                         derive_seed(config.seed, 17));
            std::vector<double> pred_y, actual_y, pred_t, actual_t;
            for (const auto& p : phys_train.points()) {
                pred_y.push_back(pfc_predict(pfc, p.x));
                actual_y.push_back(p.y);
                if (truth_theta) {
                    pred_t.push_back(pfc_theta(pfc, p.x));
                    actual_t.push_back((*truth_theta)(p.x));
                }
            }
            FoldMetrics fm;
            fm.response = metric_response(pred_y, actual_y);
            if (truth_theta) fm.theta = metric_theta(pred_t, actual_t);
            train_metrics = reduce_folds({fm});

            std::vector<FoldMetrics> folds;
            for (int f = 0; f < config.cv_folds; ++f) {
                folds.push_back(eval_pfc_fold(phys_test, test_plan, f, evaluator, theta_range,
                                              derive_seed(config.seed, 18 + static_cast<std::uint64_t>(f)),
                                              truth_theta));
            }
            test_metrics = reduce_folds(folds);
        }

        push_rows(report.rows, config.dataset_label, method == Method::gnm ? "gnm" : "pfc",
                  train_metrics, test_metrics);
    }
    return report;
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
    std::string out = "dataset,method,metric,phase,value,std\n";
    for (const auto& r : rows) {
        out += r.dataset + ',' + r.method + ',' + r.metric + ',' + r.phase + ',' +
               format_g17(r.value) + ',' + format_g17(r.stddev) + '\n';
    }
    return out;
}

std::string sweep_to_csv(const SweepResult& sweep) {
    std::string out = "lambda,mean_rmse,mean_paper_rmse,std\n";
    for (const auto& r : sweep.rows) {
        out += format_g17(r.lambda) + ',' + format_g17(r.mean_rmse) + ',' +
               format_g17(r.mean_paper_rmse) + ',' + format_g17(r.stddev) + '\n';
    }
    return out;
}

}  // namespace gnm
