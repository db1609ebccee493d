#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gnm/calibrate.hpp"
#include "gnm/dataset.hpp"

namespace gnm {

// paper_rmse is the plain sum of squared errors; conventional_rmse is
// sqrt(paper_rmse / n). Reports carry both, labeled.
struct MetricReport {
    double paper_rmse = 0.0;
    double conventional_rmse = 0.0;
    std::size_t n_points = 0;
};

MetricReport metric_response(const std::vector<double>& predicted,
                             const std::vector<double>& actual);
MetricReport metric_theta(const std::vector<double>& predicted_theta,
                          const std::vector<double>& actual_theta);

// Balanced random fold assignment over the physical indices; fold sizes
// differ by at most one.
struct FoldPlan {
    int k = 0;
    std::vector<int> assignments;  // physical index -> fold
    std::uint64_t seed = 0;
};

FoldPlan kfold(const PhysicalDataset& physical, int k, std::uint64_t seed);

// Physical points outside held_out_fold, as a dataset.
PhysicalDataset fold_train_subset(const PhysicalDataset& physical, const FoldPlan& plan,
                                  int held_out_fold);
std::vector<std::size_t> fold_test_indices(const FoldPlan& plan, int held_out_fold);

struct LambdaScore {
    double lambda = 0.0;
    double mean_rmse = 0.0;  // mean test conventional_rmse over the folds that succeeded
    std::size_t folds_ok = 0;
};

struct LambdaSelection {
    double lambda_star = 0.0;
    std::vector<LambdaScore> scores;  // ascending lambda
};

// 2-fold cross validation per grid value: fit on one fold's physical points
// (always the full model dataset), score conventional_rmse on the other,
// average. Ties go to the smaller lambda. A lambda is recorded with
// folds_ok = 0 (and excluded from the argmin) only when it fails on both
// folds.
LambdaSelection select_lambda(const PhysicalDataset& physical, const ModelDataset& model,
                              const std::vector<double>& grid, const GPConfig& gp_config,
                              const ResponseEvaluator& evaluator, std::uint64_t seed,
                              bool terminal_response = false);

struct SweepRow {
    double lambda = 0.0;
    double mean_rmse = 0.0;
    double mean_paper_rmse = 0.0;
    double stddev = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ascending lambda; failed grid values omitted
};

// One random split of the physical points (split_ratio of them for
// training), test error per grid value.
SweepResult sweep_lambda(const PhysicalDataset& physical, const ModelDataset& model,
                         const std::vector<double>& grid, const GPConfig& gp_config,
                         const ResponseEvaluator& evaluator, std::uint64_t seed,
                         double split_ratio = 0.75, bool terminal_response = false);

enum class Method { gnm, pfc };

// Full experiment: training error on the training inputs, test error by
// k-fold cross validation, for each requested method, response and (when
// the true calibration function is known) theta metrics.
struct ExperimentConfig {
    std::string dataset_label = "sd1";

    // Built-in synthetic datasets: a training-phase dataset of train_m /
    // train_n points and a separate test-phase dataset of test_m / test_n.
    std::optional<SyntheticTruth> truth;
    std::size_t train_m = 15, train_n = 450;
    std::size_t test_m = 30, test_n = 900;
    Interval x_range;
    Interval theta_range;

    // CSV-loaded data: one dataset; the test phase cross-validates it.
    std::optional<PhysicalDataset> physical;
    std::optional<ModelDataset> model;

    std::vector<Method> methods{Method::gnm, Method::pfc};
    bool lambda_cv = true;  // select lambda by 2-fold CV on the training data
    double lambda = 0.4;    // used when lambda_cv is false
    std::vector<double> lambda_grid;  // empty -> default_lambda_grid()
    GPConfig gp;
    bool terminal_response = false;
    int cv_folds = 4;
    std::uint64_t seed = 1;
};

struct ReportRow {
    std::string dataset;
    std::string method;
    std::string metric;  // "rmse" | "rmse_theta"
    std::string phase;   // "train" | "test"
    double value = 0.0;
    double stddev = 0.0;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    double lambda_used = 0.0;
    std::optional<LambdaSelection> lambda_selection;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

// {0.0, 0.05, ..., 1.0}
std::vector<double> default_lambda_grid();

// header: dataset,method,metric,phase,value,std
std::string report_to_csv(const std::vector<ReportRow>& rows);
// header: lambda,mean_rmse,mean_paper_rmse,std
std::string sweep_to_csv(const SweepResult& sweep);

}  // namespace gnm
