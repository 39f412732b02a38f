#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cfl::rf {

enum class ColKind { Numeric, Boolean, Categorical };

// Raw feature cell. Numeric/Boolean columns use Num; Categorical use Level.
struct Cell {
    enum class Tag { Num, Level, NA } tag = Tag::NA;
    double num = 0.0;
    std::string level;

    static Cell na() { return {}; }
    static Cell number(double v) { return {Tag::Num, v, {}}; }
    static Cell of_level(std::string s) { return {Tag::Level, 0.0, std::move(s)}; }
    bool is_na() const { return tag == Tag::NA; }
};

struct Column {
    std::string name;
    ColKind kind = ColKind::Numeric;
    std::vector<Cell> cells;
};

struct FeatureFrame {
    std::vector<Column> columns;
    std::vector<double> target;  // in [0, 1]

    size_t rows() const { return target.size(); }
};

struct ForestParams {
    int n_trees = 500;
    int mtry = 0;  // 0: max(1, floor(sqrt(#encoded features)))
    int min_node_size = 5;
};

struct SchemaMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Regression forest over bootstrap samples with variance-reduction splits.
//
// Missing data: numeric NAs are imputed with the training-column median and,
// when the training column has any NA, a companion 0/1 is-missing feature is
// added; categorical NAs become an explicit level. Categorical levels are
// encoded once per forest by ordering on mean target.
//
// Fully deterministic for a given (frame, params, seed); each tree draws from
// its own seed stream, so the thread count never changes results.
class Forest {
  public:
    static Forest fit(const FeatureFrame& frame, const ForestParams& params, uint64_t seed,
                      unsigned jobs = 1);

    // `row` is aligned with the training columns. Mean of per-tree leaf
    // values; within [min, max] of the training target.
    double predict(const std::vector<Cell>& row) const;

    size_t tree_count() const { return trees_.size(); }
    nlohmann::ordered_json dump() const;

  private:
    struct Node {
        int feature = -1;  // -1: leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };
    struct Tree {
        std::vector<Node> nodes;
    };
    struct Transform {
        ColKind kind = ColKind::Numeric;
        double median = 0.0;
        int missing_feature = -1;               // encoded index of the is-missing companion
        std::map<std::string, double> level_pos;  // categorical level -> ordered position
        double fallback_pos = 0.0;                // unseen levels map here
    };

    std::vector<Transform> transforms_;
    size_t encoded_width_ = 0;
    std::vector<Tree> trees_;
    ForestParams params_;
    uint64_t seed_ = 0;

    std::vector<double> encode_row(const std::vector<Cell>& row) const;
    static Tree fit_tree(const std::vector<std::vector<double>>& features,
                         const std::vector<double>& target, const ForestParams& params,
                         uint64_t tree_seed);
    friend struct ForestTestPeek;
};

}  // namespace cfl::rf
