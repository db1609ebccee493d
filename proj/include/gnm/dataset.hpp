#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gnm {

struct PhysicalPoint {
    double x = 0.0;
    double y = 0.0;
};

struct ModelPoint {
    double x = 0.0;
    double theta = 0.0;
    double y = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

// Raised by the CSV loaders; the message carries the file name and the
// 1-based line number of the offending row.
class CsvError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Observed (x, y) pairs from the physical process. Construction sorts the
// points and enforces finite values, strictly increasing x, and size >= 2.
class PhysicalDataset {
public:
    static PhysicalDataset from_points(std::vector<PhysicalPoint> pts);

    const std::vector<PhysicalPoint>& points() const { return points_; }
    const PhysicalPoint& operator[](std::size_t j) const { return points_[j]; }
    std::size_t size() const { return points_.size(); }

private:
    PhysicalDataset() = default;
    std::vector<PhysicalPoint> points_;
};

// (x, theta, y) triples from the computational model, sorted by x. Equal x
// values are allowed (grid designs repeat x); sorting is stable so ties keep
// their input order.
class ModelDataset {
public:
    static ModelDataset from_points(std::vector<ModelPoint> pts);

    const std::vector<ModelPoint>& points() const { return points_; }
    const ModelPoint& operator[](std::size_t i) const { return points_[i]; }
    std::size_t size() const { return points_.size(); }

private:
    ModelDataset() = default;
    std::vector<ModelPoint> points_;
};

// Closed-form benchmark: physical response, model response, and the true
// calibration function they agree on (model_response(x, true_theta(x)) ==
// physical_response(x)).
struct SyntheticTruth {
    std::string name;
    std::function<double(double)> physical_response;
    std::function<double(double, double)> model_response;  // (x, theta)
    std::function<double(double)> true_theta;
};

SyntheticTruth sd1_truth();
SyntheticTruth sd2_truth();

// m physical inputs uniform over x_range (resampled on exact duplicates);
// model points are floor(n/(2m)) per physical x (theta uniform over
// theta_range) plus a uniform fill of the remaining budget over
// x_range x theta_range. Bit-reproducible for a given seed.
std::pair<PhysicalDataset, ModelDataset> generate_synthetic(
    const SyntheticTruth& truth, std::size_t m, std::size_t n,
    Interval x_range, Interval theta_range, std::uint64_t seed);

// CSV schemas: physical files carry the exact header "x,y", model files
// "x,theta,y"; one point per row, '.' decimal separator, LF line endings.
PhysicalDataset load_physical(const std::string& path);
ModelDataset load_model(const std::string& path);
void write_csv(const PhysicalDataset& d, const std::string& path);
void write_csv(const ModelDataset& d, const std::string& path);

std::string to_csv(const PhysicalDataset& d);
std::string to_csv(const ModelDataset& d);

}  // namespace gnm
