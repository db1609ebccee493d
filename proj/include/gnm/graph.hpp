#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gnm/dataset.hpp"

namespace gnm {

// A physical input that attracts no model point. Cluster indices are
// 1-based to match the C_1..C_m layer convention.
class EmptyClusterError : public std::runtime_error {
public:
    EmptyClusterError(std::size_t cluster, double physical_x);
    std::size_t cluster() const { return cluster_; }
    double physical_x() const { return physical_x_; }

private:
    std::size_t cluster_;
    double physical_x_;
};

// Model-point indices grouped by nearest physical input. clusters[j] is
// ascending; the m lists partition {0..n-1} and are all non-empty.
struct ClusterPartition {
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> cluster_of;  // model index -> cluster index (0-based)
};

// Nearest physical input per model point; ties go to the smaller cluster
// index. Throws EmptyClusterError if some physical input attracts nothing.
ClusterPartition assign_clusters(const PhysicalDataset& physical, const ModelDataset& model);

// Layered DAG: artificial source (vertex 0), one layer per cluster holding
// model vertices (model index i is vertex i+1), artificial sink (vertex
// n+1). Edges exist exactly between consecutive layers plus source->C_1 and
// C_m->sink, so every source->sink path has m+1 arcs. Edges are implicit in
// the layer structure and are never materialized.
class LayeredGraph {
public:
    LayeredGraph(PhysicalDataset physical, ModelDataset model, double lambda,
                 bool terminal_response = false);

    std::size_t source() const { return 0; }
    std::size_t sink() const { return model_.size() + 1; }
    std::size_t num_clusters() const { return partition_.clusters.size(); }

    // Weight of edge (u, v) in vertex numbering. For u in C_j, v in C_{j+1}:
    //   |y^c_u - y^p_j| + lambda * |theta_u - theta_v|
    // where y^p_j is the physical response of u's cluster. Source and sink
    // edges weigh zero; with terminal_response the sink edge of u in C_m
    // instead carries |y^c_u - y^p_m|. Non-edges are a contract violation.
    double edge_weight(std::size_t u, std::size_t v) const;

    // sum over consecutive layers of |C_j||C_{j+1}|, plus |C_1| + |C_m|
    std::size_t edge_count() const;

    const ClusterPartition& partition() const { return partition_; }
    const PhysicalDataset& physical() const { return physical_; }
    const ModelDataset& model() const { return model_; }
    double lambda() const { return lambda_; }
    bool terminal_response() const { return terminal_response_; }

private:
    PhysicalDataset physical_;
    ModelDataset model_;
    ClusterPartition partition_;
    double lambda_;
    bool terminal_response_;
};

LayeredGraph build_graph(const PhysicalDataset& physical, const ModelDataset& model,
                         double lambda, bool terminal_response = false);

}  // namespace gnm
