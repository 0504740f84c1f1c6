#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "leadform/graph.hpp"
#include "leadform/spectrum.hpp"

namespace leadform {

/// Bipartite graph of the pencil sI - A: row vertices u_0..u_{n-1}, column
/// vertices v_0..v_{n-1}, one edge per nonzero entry. Indices are 0-based
/// matrix indices.
struct BipartiteEdge {
    enum class Kind { Pencil, Constant };  // (s - a_ii) or -a_ij

    int row = 0;
    int col = 0;
    Kind kind = Kind::Constant;
    double value = 0.0;  // a_ij as stored in A
};

class BipartiteGraph {
public:
    explicit BipartiteGraph(int n);

    int size() const noexcept { return n_; }
    const std::vector<BipartiteEdge>& edges() const noexcept { return edges_; }
    /// Edges incident to row vertex u_r, ascending column.
    const std::vector<BipartiteEdge>& row_edges(int r) const { return rows_.at(static_cast<std::size_t>(r)); }
    bool has_edge(int r, int c) const;
    std::size_t off_diagonal_count() const noexcept { return edges_.size() - static_cast<std::size_t>(n_); }

    void add_off_diagonal(int r, int c, double value);
    void set_diagonal_value(int r, double value);

private:
    void rebuild();

    int n_;
    std::vector<BipartiteEdge> edges_;
    std::vector<std::vector<BipartiteEdge>> rows_;
};

/// Every diagonal pair plus one edge per nonzero off-diagonal entry.
/// Throws NonSquare.
BipartiteGraph pencil_bipartite(const Matrix& a);

/// Structural pencil of the closed loop built on g: agent i listening to j
/// gives row i-1, column j-1.
BipartiteGraph pencil_bipartite(const CommGraph& g);

struct Matching {
    std::vector<std::pair<int, int>> pairs;  // (row, col), sorted by row

    bool is_perfect(int n) const;
    friend bool operator==(const Matching&, const Matching&) = default;
};

Matching diagonal_matching(int n);

/// All perfect matchings in lexicographic order of their column sequence.
/// Throws LimitExceeded when more than `limit` exist.
std::vector<Matching> enumerate_perfect_matchings(const BipartiteGraph& bg, std::size_t limit);

struct BipartiteVertex {
    enum class Side { Row, Col };
    Side side = Side::Row;
    int index = 0;

    friend bool operator==(const BipartiteVertex&, const BipartiteVertex&) = default;
};

/// Closed walk u v u v ... (first vertex not repeated) whose edges alternate
/// between `m` and the rest of the graph. Throws NotPerfectMatching.
std::optional<std::vector<BipartiteVertex>> find_alternating_cycle(const BipartiteGraph& bg, const Matching& m);

/// 1-based rendering, e.g. "u1 v2 u2 v1".
std::string format_cycle(const std::vector<BipartiteVertex>& cycle);

struct CycleEquivalence {
    bool g_has_cycle = false;
    bool bg_has_cycle = false;
    bool equivalent() const noexcept { return g_has_cycle == bg_has_cycle; }
};

CycleEquivalence lemma_cycle_equivalence(const CommGraph& g);

/// det(sI - A) as a signed sum over the perfect matchings of the pencil.
/// Throws TooLarge for n > 12.
Polynomial char_poly_matchings(const Matrix& a);

}  // namespace leadform
