#include "gnm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gnm/util.hpp"

namespace gnm {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

PhysicalDataset PhysicalDataset::from_points(std::vector<PhysicalPoint> pts) {
    if (pts.size() < 2) {
        throw std::invalid_argument("physical dataset needs at least 2 points, got " +
                                    std::to_string(pts.size()));
    }
    for (const auto& p : pts) {
        if (!finite(p.x) || !finite(p.y)) {
            throw std::invalid_argument("physical dataset contains a non-finite value");
        }
    }
    std::sort(pts.begin(), pts.end(),
              [](const PhysicalPoint& a, const PhysicalPoint& b) { return a.x < b.x; });
    for (std::size_t j = 1; j < pts.size(); ++j) {
        if (pts[j].x == pts[j - 1].x) {
            throw std::invalid_argument("duplicate physical x = " + format_g17(pts[j].x));
        }
    }
    PhysicalDataset d;
    d.points_ = std::move(pts);
    return d;
}

ModelDataset ModelDataset::from_points(std::vector<ModelPoint> pts) {
    if (pts.empty()) {
        throw std::invalid_argument("model dataset is empty");
    }
    for (const auto& p : pts) {
        if (!finite(p.x) || !finite(p.theta) || !finite(p.y)) {
            throw std::invalid_argument("model dataset contains a non-finite value");
        }
    }
    std::stable_sort(pts.begin(), pts.end(),
                     [](const ModelPoint& a, const ModelPoint& b) { return a.x < b.x; });
    ModelDataset d;
    d.points_ = std::move(pts);
    return d;
}

SyntheticTruth sd1_truth() {
    SyntheticTruth t;
    t.name = "sd1";
    t.physical_response = [](double x) { return std::exp(x / 10.0) * std::sin(x); };
    t.model_response = [](double x, double theta) {
        if (theta == 0.0) {
            throw std::domain_error("sd1 model response is undefined at theta = 0");
        }
        return std::exp(x / 10.0) * std::sin(x) * x / (2.0 * theta);
    };
    t.true_theta = [](double x) { return 0.5 * x; };
    return t;
}

SyntheticTruth sd2_truth() {
    SyntheticTruth t;
    t.name = "sd2";
    t.physical_response = [](double x) { return std::cos(2.0 * x) * std::sin(x / 2.0); };
    t.model_response = [](double x, double theta) {
        const double q = (x - 2.0) * (x - 2.0);
        const double pi = 3.14159265358979323846;
        return std::cos(2.0 * x) * std::sin(x / 2.0) *
               std::sin(pi * theta / (2.0 * q + 2.0)) *
               std::cos(2.0 * pi * theta / (q + 1.0)) *
               std::exp(theta / (2.0 * q + 2.0) - 0.5);
    };
    t.true_theta = [](double x) { return (x - 2.0) * (x - 2.0) + 1.0; };
    return t;
}

std::pair<PhysicalDataset, ModelDataset> generate_synthetic(
    const SyntheticTruth& truth, std::size_t m, std::size_t n,
    Interval x_range, Interval theta_range, std::uint64_t seed) {
    if (m < 2) throw std::invalid_argument("generate_synthetic: m must be >= 2");
    if (n < m) throw std::invalid_argument("generate_synthetic: n must be >= m");
    if (!(x_range.lo < x_range.hi) || !(theta_range.lo < theta_range.hi)) {
        throw std::invalid_argument("generate_synthetic: degenerate range");
    }

    // Physical inputs: uniform draws, exact duplicates resampled so x is
    // strictly increasing after the sort.
    SplitMix64 rng_x(derive_seed(seed, 1));
    std::set<double> seen;
    std::vector<double> xs;
    xs.reserve(m);
    while (xs.size() < m) {
        double x = rng_x.uniform(x_range.lo, x_range.hi);
        if (seen.insert(x).second) xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());

    std::vector<PhysicalPoint> phys(m);
    for (std::size_t j = 0; j < m; ++j) {
        phys[j] = PhysicalPoint{xs[j], truth.physical_response(xs[j])};
    }

    // Model points: a column of floor(n/(2m)) draws at each physical x keeps
    // every physical input covered by at least one model input; the rest of
    // the budget fills the rectangle uniformly.
    const std::size_t per_column = n / (2 * m);
    std::vector<ModelPoint> model;
    model.reserve(n);

    SplitMix64 rng_col(derive_seed(seed, 2));
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t c = 0; c < per_column; ++c) {
            double theta = rng_col.uniform(theta_range.lo, theta_range.hi);
            model.push_back(ModelPoint{xs[j], theta, truth.model_response(xs[j], theta)});
        }
    }

    SplitMix64 rng_fill(derive_seed(seed, 3));
    while (model.size() < n) {
        double x = rng_fill.uniform(x_range.lo, x_range.hi);
        double theta = rng_fill.uniform(theta_range.lo, theta_range.hi);
        model.push_back(ModelPoint{x, theta, truth.model_response(x, theta)});
    }

    return {PhysicalDataset::from_points(std::move(phys)),
            ModelDataset::from_points(std::move(model))};
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

// Lines with 1-based numbering; a trailing '\r' is stripped so CRLF files
// still parse.
std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError(path + ": cannot open file");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

double parse_field(const std::string& path, std::size_t line_no,
                   const std::string& field, const char* column) {
    double v = 0.0;
    if (!parse_double(field, v)) {
        throw CsvError(path + " line " + std::to_string(line_no) + ": malformed " +
                       column + " value '" + field + "'");
    }
    if (!std::isfinite(v)) {
        throw CsvError(path + " line " + std::to_string(line_no) + ": non-finite " +
                       column + " value '" + field + "'");
    }
    return v;
}

}  // namespace

PhysicalDataset load_physical(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != "x,y") {
        throw CsvError(path + " line 1: expected header 'x,y'");
    }
    std::vector<PhysicalPoint> pts;
    std::vector<std::size_t> line_of;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty() && i + 1 == lines.size()) break;  // trailing newline
        const std::size_t line_no = i + 1;
        auto fields = split_fields(lines[i]);
        if (fields.size() != 2) {
            throw CsvError(path + " line " + std::to_string(line_no) +
                           ": expected 2 fields, got " + std::to_string(fields.size()));
        }
        PhysicalPoint p;
        p.x = parse_field(path, line_no, fields[0], "x");
        p.y = parse_field(path, line_no, fields[1], "y");
        pts.push_back(p);
        line_of.push_back(line_no);
    }
    if (pts.size() < 2) {
        throw CsvError(path + ": physical dataset needs at least 2 rows, got " +
                       std::to_string(pts.size()));
    }
    // Attribute duplicate x to the later row before handing off to the
    // (line-agnostic) dataset constructor.
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pts[a].x < pts[b].x; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (pts[order[i]].x == pts[order[i - 1]].x) {
            std::size_t bad = std::max(line_of[order[i]], line_of[order[i - 1]]);
            throw CsvError(path + " line " + std::to_string(bad) +
                           ": duplicate physical x = " + format_g17(pts[order[i]].x));
        }
    }
    return PhysicalDataset::from_points(std::move(pts));
}

ModelDataset load_model(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != "x,theta,y") {
        throw CsvError(path + " line 1: expected header 'x,theta,y'");
    }
    std::vector<ModelPoint> pts;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty() && i + 1 == lines.size()) break;
        const std::size_t line_no = i + 1;
        auto fields = split_fields(lines[i]);
        if (fields.size() != 3) {
            throw CsvError(path + " line " + std::to_string(line_no) +
                           ": expected 3 fields, got " + std::to_string(fields.size()));
        }
        ModelPoint p;
        p.x = parse_field(path, line_no, fields[0], "x");
        p.theta = parse_field(path, line_no, fields[1], "theta");
        p.y = parse_field(path, line_no, fields[2], "y");
        pts.push_back(p);
    }
    if (pts.empty()) {
        throw CsvError(path + ": model dataset has no rows");
    }
    return ModelDataset::from_points(std::move(pts));
}

std::string to_csv(const PhysicalDataset& d) {
    std::string out = "x,y\n";
    for (const auto& p : d.points()) {
        out += format_g17(p.x);
        out += ',';
        out += format_g17(p.y);
        out += '\n';
    }
    return out;
}

std::string to_csv(const ModelDataset& d) {
    std::string out = "x,theta,y\n";
    for (const auto& p : d.points()) {
        out += format_g17(p.x);
        out += ',';
        out += format_g17(p.theta);
        out += ',';
        out += format_g17(p.y);
        out += '\n';
    }
    return out;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

void write_csv(const PhysicalDataset& d, const std::string& path) {
    write_file(path, to_csv(d));
}

void write_csv(const ModelDataset& d, const std::string& path) {
    write_file(path, to_csv(d));
}

}  // namespace gnm
