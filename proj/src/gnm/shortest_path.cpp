#include "gnm/shortest_path.hpp"

#include <limits>
#include <stdexcept>

namespace gnm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBruteForceCap = 1e6;
}  // namespace

AnchorPath shortest_anchor_path(const LayeredGraph& g) {
    const auto& clusters = g.partition().clusters;
    const std::size_t m = clusters.size();
    const std::size_t n = g.model().size();
    const std::size_t sink = g.sink();

    std::vector<double> dist(n + 2, kInf);
    std::vector<std::size_t> pred(n + 2, n + 2);
    dist[g.source()] = 0.0;
    std::size_t relaxations = 0;

    auto relax = [&](std::size_t u, std::size_t v) {
        ++relaxations;
        const double cand = dist[u] + g.edge_weight(u, v);
        if (dist[v] > cand) {
            dist[v] = cand;
            pred[v] = u;
        }
    };

    for (std::size_t i : clusters[0]) relax(g.source(), i + 1);
    for (std::size_t j = 0; j + 1 < m; ++j) {
        for (std::size_t iu : clusters[j]) {
            for (std::size_t iv : clusters[j + 1]) relax(iu + 1, iv + 1);
        }
    }
    for (std::size_t i : clusters[m - 1]) relax(i + 1, sink);

    AnchorPath path;
    path.relaxations = relaxations;
    path.total_cost = dist[sink];
    path.anchors.resize(m);
    std::size_t v = pred[sink];
    for (std::size_t j = m; j-- > 0;) {
        path.anchors[j] = v - 1;
        v = pred[v];
    }
    return path;
}

double path_cost(const LayeredGraph& g, const std::vector<std::size_t>& anchors) {
    if (anchors.size() != g.num_clusters()) {
        throw std::invalid_argument("path_cost: expected one anchor per cluster");
    }
    double cost = g.edge_weight(g.source(), anchors.front() + 1);
    for (std::size_t j = 0; j + 1 < anchors.size(); ++j) {
        cost += g.edge_weight(anchors[j] + 1, anchors[j + 1] + 1);
    }
    cost += g.edge_weight(anchors.back() + 1, g.sink());
    return cost;
}

AnchorPath brute_force_shortest(const LayeredGraph& g) {
    const auto& clusters = g.partition().clusters;
    const std::size_t m = clusters.size();

    double combinations = 1.0;
    for (const auto& c : clusters) combinations *= static_cast<double>(c.size());
    if (combinations > kBruteForceCap) {
        throw std::invalid_argument("brute_force_shortest: " + std::to_string(combinations) +
                                    " combinations exceed the 1e6 enumeration cap");
    }

    std::vector<std::size_t> pick(m, 0);    // position within each cluster
    std::vector<double> prefix(m + 1, 0.0);  // cost up to and including arc into layer j

    AnchorPath best;
    best.total_cost = kInf;

    // Depth-first product enumeration; visiting order is lexicographic in
    // anchor indices because cluster lists are ascending.
    std::size_t j = 0;
    for (;;) {
        if (pick[j] == clusters[j].size()) {
            if (j == 0) break;
            --j;
            ++pick[j];
            continue;
        }
        const std::size_t v = clusters[j][pick[j]];
        if (j == 0) {
            prefix[1] = g.edge_weight(g.source(), v + 1);
        } else {
            const std::size_t u = clusters[j - 1][pick[j - 1]];
            prefix[j + 1] = prefix[j] + g.edge_weight(u + 1, v + 1);
        }
        if (j + 1 < m) {
            ++j;
            pick[j] = 0;
            continue;
        }
        const double total = prefix[m] + g.edge_weight(v + 1, g.sink());
        if (total < best.total_cost) {
            best.total_cost = total;
            best.anchors.resize(m);
            for (std::size_t k = 0; k < m; ++k) best.anchors[k] = clusters[k][pick[k]];
        }
        ++pick[j];
    }
    return best;
}

}  // namespace gnm
