#include "gnm/graph.hpp"

#include <algorithm>
#include <cmath>

#include "gnm/util.hpp"

namespace gnm {

EmptyClusterError::EmptyClusterError(std::size_t cluster, double physical_x)
    : std::runtime_error("cluster " + std::to_string(cluster) +
                         " is empty: no model point is nearest to physical x = " +
                         format_g17(physical_x)),
      cluster_(cluster),
      physical_x_(physical_x) {}

ClusterPartition assign_clusters(const PhysicalDataset& physical, const ModelDataset& model) {
    const std::size_t m = physical.size();
    const std::size_t n = model.size();

    ClusterPartition part;
    part.clusters.assign(m, {});
    part.cluster_of.assign(n, 0);

    // Physical x is strictly increasing, so the nearest cluster follows from
    // the insertion position; the <= keeps exact midpoints on the smaller j.
    std::vector<double> px(m);
    for (std::size_t j = 0; j < m; ++j) px[j] = physical[j].x;

    for (std::size_t i = 0; i < n; ++i) {
        const double x = model[i].x;
        auto it = std::lower_bound(px.begin(), px.end(), x);
        std::size_t hi = static_cast<std::size_t>(it - px.begin());
        std::size_t j;
        if (hi == 0) {
            j = 0;
        } else if (hi == m) {
            j = m - 1;
        } else {
            j = (std::abs(px[hi - 1] - x) <= std::abs(px[hi] - x)) ? hi - 1 : hi;
        }
        part.cluster_of[i] = j;
        part.clusters[j].push_back(i);
    }

    for (std::size_t j = 0; j < m; ++j) {
        if (part.clusters[j].empty()) {
            throw EmptyClusterError(j + 1, px[j]);
        }
    }
    return part;
}

LayeredGraph::LayeredGraph(PhysicalDataset physical, ModelDataset model, double lambda,
                           bool terminal_response)
    : physical_(std::move(physical)),
      model_(std::move(model)),
      partition_(assign_clusters(physical_, model_)),
      lambda_(lambda),
      terminal_response_(terminal_response) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be finite and >= 0, got " + format_g17(lambda));
    }
}

double LayeredGraph::edge_weight(std::size_t u, std::size_t v) const {
    const std::size_t m = num_clusters();
    const std::size_t n = model_.size();

    if (u == source()) {
        if (v == 0 || v > n || partition_.cluster_of[v - 1] != 0) {
            throw std::logic_error("edge_weight: (source, v) is not an edge");
        }
        return 0.0;
    }
    if (u == 0 || u > n) throw std::logic_error("edge_weight: invalid tail vertex");

    const std::size_t iu = u - 1;
    const std::size_t j = partition_.cluster_of[iu];
    const ModelPoint& pu = model_[iu];

    if (v == sink()) {
        if (j != m - 1) throw std::logic_error("edge_weight: (u, sink) is not an edge");
        return terminal_response_ ? std::abs(pu.y - physical_[m - 1].y) : 0.0;
    }
    if (v == 0 || v > n || partition_.cluster_of[v - 1] != j + 1) {
        throw std::logic_error("edge_weight: (u, v) does not join consecutive clusters");
    }

    const ModelPoint& pv = model_[v - 1];
    return std::abs(pu.y - physical_[j].y) + lambda_ * std::abs(pu.theta - pv.theta);
}

std::size_t LayeredGraph::edge_count() const {
    const auto& clusters = partition_.clusters;
    std::size_t count = clusters.front().size() + clusters.back().size();
    for (std::size_t j = 0; j + 1 < clusters.size(); ++j) {
        count += clusters[j].size() * clusters[j + 1].size();
    }
    return count;
}

LayeredGraph build_graph(const PhysicalDataset& physical, const ModelDataset& model,
                         double lambda, bool terminal_response) {
    return LayeredGraph(physical, model, lambda, terminal_response);
}

}  // namespace gnm
