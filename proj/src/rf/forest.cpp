#include "cfl/rf/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfl/support/parallel.hpp"
#include "cfl/support/rng.hpp"

namespace cfl::rf {

namespace {

const std::string kNaLevel = "__NA__";

double median_of(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    size_t n = xs.size();
    return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

}  // namespace

Forest Forest::fit(const FeatureFrame& frame, const ForestParams& params, uint64_t seed,
                   unsigned jobs) {
    size_t n = frame.rows();
    for (const auto& col : frame.columns)
        if (col.cells.size() != n)
            throw SchemaMismatch("column '" + col.name + "' length does not match target");

    Forest forest;
    forest.params_ = params;
    forest.seed_ = seed;
    forest.transforms_.resize(frame.columns.size());

    // encoded layout: one base feature per column, then is-missing companions
    std::vector<std::vector<double>> features;
    features.resize(frame.columns.size());
    std::vector<std::vector<double>> missing_cols;

    for (size_t c = 0; c < frame.columns.size(); ++c) {
        const Column& col = frame.columns[c];
        Transform& tr = forest.transforms_[c];
        tr.kind = col.kind;
        features[c].resize(n, 0.0);
        if (col.kind == ColKind::Categorical) {
            // levels in first-appearance order, NA as an explicit level
            std::map<std::string, size_t> first_seen;
            std::vector<std::string> levels;
            auto level_of = [&](const Cell& cell) -> const std::string& {
                return cell.is_na() ? kNaLevel : cell.level;
            };
            for (const auto& cell : col.cells) {
                const std::string& lv = level_of(cell);
                if (!first_seen.count(lv)) {
                    first_seen[lv] = levels.size();
                    levels.push_back(lv);
                }
            }
            // order levels by mean target (ties by first appearance)
            std::vector<double> sum(levels.size(), 0.0), cnt(levels.size(), 0.0);
            for (size_t i = 0; i < n; ++i) {
                size_t id = first_seen[level_of(col.cells[i])];
                sum[id] += frame.target[i];
                cnt[id] += 1.0;
            }
            std::vector<size_t> order(levels.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                double ma = sum[a] / cnt[a], mb = sum[b] / cnt[b];
                if (ma != mb) return ma < mb;
                return a < b;
            });
            std::vector<double> pos(levels.size());
            for (size_t rank = 0; rank < order.size(); ++rank)
                pos[order[rank]] = static_cast<double>(rank);
            for (size_t id = 0; id < levels.size(); ++id) tr.level_pos[levels[id]] = pos[id];
            size_t most_frequent = 0;
            for (size_t id = 1; id < levels.size(); ++id)
                if (cnt[id] > cnt[most_frequent]) most_frequent = id;
            tr.fallback_pos = pos[most_frequent];
            for (size_t i = 0; i < n; ++i)
                features[c][i] = pos[first_seen[level_of(col.cells[i])]];
        } else {
            std::vector<double> present;
            bool any_na = false;
            for (const auto& cell : col.cells) {
                if (cell.is_na()) any_na = true;
                else present.push_back(cell.num);
            }
            tr.median = median_of(std::move(present));
            if (any_na) {
                std::vector<double> indicator(n, 0.0);
                for (size_t i = 0; i < n; ++i) {
                    if (col.cells[i].is_na()) {
                        features[c][i] = tr.median;
                        indicator[i] = 1.0;
                    } else {
                        features[c][i] = col.cells[i].num;
                    }
                }
                tr.missing_feature =
                    static_cast<int>(frame.columns.size() + missing_cols.size());
                missing_cols.push_back(std::move(indicator));
            } else {
                for (size_t i = 0; i < n; ++i) features[c][i] = col.cells[i].num;
            }
        }
    }
    for (auto& mc : missing_cols) features.push_back(std::move(mc));
    forest.encoded_width_ = features.size();

    int n_trees = std::max(1, params.n_trees);
    forest.trees_.resize(static_cast<size_t>(n_trees));
    parallel_for(static_cast<size_t>(n_trees), jobs, [&](size_t t) {
        forest.trees_[t] = fit_tree(features, frame.target, params, mix_seed(seed, t));
    });
    return forest;
}

Forest::Tree Forest::fit_tree(const std::vector<std::vector<double>>& features,
                              const std::vector<double>& target, const ForestParams& params,
                              uint64_t tree_seed) {
    Tree tree;
    size_t n = target.size();
    size_t p = features.size();
    Rng rng(tree_seed);

    std::vector<size_t> sample(n);
    for (size_t i = 0; i < n; ++i) sample[i] = rand_index(rng, n);

    int mtry = params.mtry > 0 ? params.mtry
                               : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(p)))));
    mtry = std::min<int>(mtry, static_cast<int>(p));
    size_t min_node = static_cast<size_t>(std::max(1, params.min_node_size));

    std::vector<size_t> feature_pool(p);
    std::iota(feature_pool.begin(), feature_pool.end(), 0);

    // (node id, row indices) work list; grows tree.nodes in preorder
    struct Item {
        int node;
        std::vector<size_t> rows;
    };
    std::vector<Item> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, sample});

    std::vector<std::pair<double, double>> sorted_xy;
    while (!stack.empty()) {
        Item item = std::move(stack.back());
        stack.pop_back();
        Node& node = tree.nodes[static_cast<size_t>(item.node)];
        const auto& rows = item.rows;

        double sum = 0.0;
        for (size_t r : rows) sum += target[r];
        double mean = sum / static_cast<double>(rows.size());
        bool pure = true;
        for (size_t r : rows)
            if (target[r] != target[rows[0]]) {
                pure = false;
                break;
            }
        if (pure || rows.size() <= min_node) {
            node.value = mean;
            continue;
        }

        // sample mtry features without replacement; visit in ascending index
        // order so gain ties resolve to the lowest feature, lowest threshold
        for (int k = 0; k < mtry; ++k) {
            size_t swap_at = k + rand_index(rng, p - static_cast<size_t>(k));
            std::swap(feature_pool[static_cast<size_t>(k)], feature_pool[swap_at]);
        }
        std::vector<size_t> tried(feature_pool.begin(), feature_pool.begin() + mtry);
        std::sort(tried.begin(), tried.end());

        double parent_score = sum * sum / static_cast<double>(rows.size());
        double best_gain = 1e-12;
        int best_feature = -1;
        double best_threshold = 0.0;
        for (size_t f : tried) {
            sorted_xy.clear();
            sorted_xy.reserve(rows.size());
            for (size_t r : rows) sorted_xy.emplace_back(features[f][r], target[r]);
            std::sort(sorted_xy.begin(), sorted_xy.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            double left_sum = 0.0;
            for (size_t i = 0; i + 1 < sorted_xy.size(); ++i) {
                left_sum += sorted_xy[i].second;
                if (sorted_xy[i].first == sorted_xy[i + 1].first) continue;
                double nl = static_cast<double>(i + 1);
                double nr = static_cast<double>(sorted_xy.size() - i - 1);
                double right_sum = sum - left_sum;
                double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent_score;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = sorted_xy[i].first + (sorted_xy[i + 1].first - sorted_xy[i].first) / 2.0;
                }
            }
        }
        if (best_feature < 0) {
            node.value = mean;
            continue;
        }

        std::vector<size_t> left_rows, right_rows;
        for (size_t r : rows) {
            if (features[static_cast<size_t>(best_feature)][r] <= best_threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        if (left_rows.empty() || right_rows.empty()) {  // all values equal; cannot happen
            node.value = mean;
            continue;
        }
        int left_id = static_cast<int>(tree.nodes.size());
        int right_id = left_id + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();  // may reallocate; re-fetch the parent
        Node& parent = tree.nodes[static_cast<size_t>(item.node)];
        parent.feature = best_feature;
        parent.threshold = best_threshold;
        parent.left = left_id;
        parent.right = right_id;
        stack.push_back({right_id, std::move(right_rows)});
        stack.push_back({left_id, std::move(left_rows)});
    }
    return tree;
}

std::vector<double> Forest::encode_row(const std::vector<Cell>& row) const {
    if (row.size() != transforms_.size())
        throw SchemaMismatch("prediction row width does not match training columns");
    std::vector<double> x(encoded_width_, 0.0);
    for (size_t c = 0; c < row.size(); ++c) {
        const Transform& tr = transforms_[c];
        const Cell& cell = row[c];
        if (tr.kind == ColKind::Categorical) {
            const std::string& lv = cell.is_na() ? kNaLevel : cell.level;
            auto it = tr.level_pos.find(lv);
            x[c] = it != tr.level_pos.end() ? it->second : tr.fallback_pos;
        } else if (cell.is_na()) {
            x[c] = tr.median;
            if (tr.missing_feature >= 0) x[static_cast<size_t>(tr.missing_feature)] = 1.0;
        } else {
            x[c] = cell.num;
        }
    }
    return x;
}

double Forest::predict(const std::vector<Cell>& row) const {
    std::vector<double> x = encode_row(row);
    double sum = 0.0;
    for (const auto& tree : trees_) {
        int at = 0;
        for (;;) {
            const Node& node = tree.nodes[static_cast<size_t>(at)];
            if (node.feature < 0) {
                sum += node.value;
                break;
            }
            at = x[static_cast<size_t>(node.feature)] <= node.threshold ? node.left : node.right;
        }
    }
    return sum / static_cast<double>(trees_.size());
}

nlohmann::ordered_json Forest::dump() const {
    nlohmann::ordered_json doc;
    doc["n_trees"] = trees_.size();
    doc["mtry"] = params_.mtry;
    doc["min_node_size"] = params_.min_node_size;
    doc["seed"] = seed_;
    nlohmann::ordered_json jtrees = nlohmann::ordered_json::array();
    for (const auto& tree : trees_) {
        nlohmann::ordered_json jnodes = nlohmann::ordered_json::array();
        for (const auto& node : tree.nodes) {
            if (node.feature < 0) {
                jnodes.push_back({{"leaf", node.value}});
            } else {
                jnodes.push_back({{"feature", node.feature},
                                  {"threshold", node.threshold},
                                  {"left", node.left},
                                  {"right", node.right}});
            }
        }
        jtrees.push_back(std::move(jnodes));
    }
    doc["trees"] = std::move(jtrees);
    return doc;
}

}  // namespace cfl::rf
