#include "leadform/bipartite.hpp"

#include <algorithm>
#include <string>

#include "leadform/errors.hpp"

namespace leadform {

BipartiteGraph::BipartiteGraph(int n) : n_(n) {
    for (int i = 0; i < n; ++i) edges_.push_back({i, i, BipartiteEdge::Kind::Pencil, 0.0});
    rebuild();
}

bool BipartiteGraph::has_edge(int r, int c) const {
    const auto& row = row_edges(r);
    return std::any_of(row.begin(), row.end(), [c](const BipartiteEdge& e) { return e.col == c; });
}

void BipartiteGraph::add_off_diagonal(int r, int c, double value) {
    if (r < 0 || r >= n_ || c < 0 || c >= n_) throw Error(ErrorCode::IndexOutOfRange, "pencil entry outside matrix");
    if (r == c || has_edge(r, c)) return;
    edges_.push_back({r, c, BipartiteEdge::Kind::Constant, value});
    rebuild();
}

void BipartiteGraph::set_diagonal_value(int r, double value) {
    for (auto& e : edges_) {
        if (e.row == r && e.col == r) e.value = value;
    }
    rebuild();
}

void BipartiteGraph::rebuild() {
    std::sort(edges_.begin(), edges_.end(), [](const BipartiteEdge& x, const BipartiteEdge& y) {
        return x.row != y.row ? x.row < y.row : x.col < y.col;
    });
    rows_.assign(static_cast<std::size_t>(n_), {});
    for (const auto& e : edges_) rows_[static_cast<std::size_t>(e.row)].push_back(e);
}

BipartiteGraph pencil_bipartite(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error(ErrorCode::NonSquare, "pencil of a non-square matrix");
    const int n = static_cast<int>(a.rows());
    BipartiteGraph bg(n);
    for (int i = 0; i < n; ++i) {
        bg.set_diagonal_value(i, a(i, i));
        for (int j = 0; j < n; ++j) {
            if (i != j && a(i, j) != 0.0) bg.add_off_diagonal(i, j, a(i, j));
        }
    }
    return bg;
}

BipartiteGraph pencil_bipartite(const CommGraph& g) {
    BipartiteGraph bg(g.size());
    for (const auto& e : g.edges()) bg.add_off_diagonal(e.to - 1, e.from - 1, 1.0);
    return bg;
}

bool Matching::is_perfect(int n) const {
    if (pairs.size() != static_cast<std::size_t>(n)) return false;
    std::vector<bool> row_used(static_cast<std::size_t>(n), false);
    std::vector<bool> col_used(static_cast<std::size_t>(n), false);
    for (auto [r, c] : pairs) {
        if (r < 0 || r >= n || c < 0 || c >= n) return false;
        if (row_used[static_cast<std::size_t>(r)] || col_used[static_cast<std::size_t>(c)]) return false;
        row_used[static_cast<std::size_t>(r)] = col_used[static_cast<std::size_t>(c)] = true;
    }
    return true;
}

Matching diagonal_matching(int n) {
    Matching m;
    for (int i = 0; i < n; ++i) m.pairs.emplace_back(i, i);
    return m;
}

namespace {

// Row-by-row backtracking over columns with nonzero support. `visit` returns
// false to stop early.
template <class Visit>
bool for_each_perfect_matching(const BipartiteGraph& bg, Visit&& visit) {
    const int n = bg.size();
    std::vector<int> col_of_row(static_cast<std::size_t>(n), -1);
    std::vector<bool> col_used(static_cast<std::size_t>(n), false);
    std::vector<std::size_t> cursor(static_cast<std::size_t>(n), 0);

    int r = 0;
    while (r >= 0) {
        if (r == n) {
            if (!visit(col_of_row)) return false;
            --r;
            if (r >= 0) col_used[static_cast<std::size_t>(col_of_row[static_cast<std::size_t>(r)])] = false;
            continue;
        }
        const auto& row = bg.row_edges(r);
        auto& k = cursor[static_cast<std::size_t>(r)];
        while (k < row.size() && col_used[static_cast<std::size_t>(row[k].col)]) ++k;
        if (k == row.size()) {
            k = 0;
            --r;
            if (r >= 0) col_used[static_cast<std::size_t>(col_of_row[static_cast<std::size_t>(r)])] = false;
            continue;
        }
        int c = row[k++].col;
        col_of_row[static_cast<std::size_t>(r)] = c;
        col_used[static_cast<std::size_t>(c)] = true;
        ++r;
    }
    return true;
}

int permutation_sign(const std::vector<int>& perm) {
    int inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        for (std::size_t j = i + 1; j < perm.size(); ++j) {
            if (perm[i] > perm[j]) ++inversions;
        }
    }
    return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace

std::vector<Matching> enumerate_perfect_matchings(const BipartiteGraph& bg, std::size_t limit) {
    if (limit < 1) throw Error(ErrorCode::LimitExceeded, "matching limit must be at least 1");
    std::vector<Matching> out;
    bool exceeded = false;
    for_each_perfect_matching(bg, [&](const std::vector<int>& col_of_row) {
        if (out.size() == limit) {
            exceeded = true;
            return false;
        }
        Matching m;
        for (int r = 0; r < bg.size(); ++r) m.pairs.emplace_back(r, col_of_row[static_cast<std::size_t>(r)]);
        out.push_back(std::move(m));
        return true;
    });
    if (exceeded) {
        throw Error(ErrorCode::LimitExceeded, "more than " + std::to_string(limit) + " perfect matchings");
    }
    return out;
}

std::optional<std::vector<BipartiteVertex>> find_alternating_cycle(const BipartiteGraph& bg, const Matching& m) {
    const int n = bg.size();
    if (!m.is_perfect(n)) throw Error(ErrorCode::NotPerfectMatching, "matching does not cover every row and column");
    std::vector<int> col_of_row(static_cast<std::size_t>(n));
    std::vector<int> row_of_col(static_cast<std::size_t>(n));
    for (auto [r, c] : m.pairs) {
        if (!bg.has_edge(r, c)) throw Error(ErrorCode::NotPerfectMatching, "matching uses an edge absent from the graph");
        col_of_row[static_cast<std::size_t>(r)] = c;
        row_of_col[static_cast<std::size_t>(c)] = r;
    }

    // Orient non-matching edges row -> col and matching edges col -> row; an
    // alternating cycle is a directed cycle. Contracting each column into its
    // matched row leaves a digraph on rows: r -> row_of_col[c].
    enum class Mark { White, Grey, Black };
    std::vector<Mark> mark(static_cast<std::size_t>(n), Mark::White);
    std::vector<int> via_col(static_cast<std::size_t>(n), -1);  // column used to enter a row
    std::vector<int> parent(static_cast<std::size_t>(n), -1);

    for (int root = 0; root < n; ++root) {
        if (mark[static_cast<std::size_t>(root)] != Mark::White) continue;
        std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
        mark[static_cast<std::size_t>(root)] = Mark::Grey;
        while (!stack.empty()) {
            auto& [r, next] = stack.back();
            const auto& row = bg.row_edges(r);
            if (next == row.size()) {
                mark[static_cast<std::size_t>(r)] = Mark::Black;
                stack.pop_back();
                continue;
            }
            const auto& e = row[next++];
            if (e.col == col_of_row[static_cast<std::size_t>(r)]) continue;
            int w = row_of_col[static_cast<std::size_t>(e.col)];
            auto& mw = mark[static_cast<std::size_t>(w)];
            if (mw == Mark::Grey) {
                // rows w ... r on the DFS path, closing edge r -> e.col -> w
                std::vector<int> rows;
                for (int u = r; u != w; u = parent[static_cast<std::size_t>(u)]) rows.push_back(u);
                rows.push_back(w);
                std::reverse(rows.begin(), rows.end());
                std::vector<BipartiteVertex> cycle;
                for (std::size_t k = 0; k < rows.size(); ++k) {
                    int u = rows[k];
                    int leave_col = k + 1 < rows.size() ? via_col[static_cast<std::size_t>(rows[k + 1])] : e.col;
                    cycle.push_back({BipartiteVertex::Side::Row, u});
                    cycle.push_back({BipartiteVertex::Side::Col, leave_col});
                }
                return cycle;
            }
            if (mw == Mark::White) {
                mw = Mark::Grey;
                parent[static_cast<std::size_t>(w)] = r;
                via_col[static_cast<std::size_t>(w)] = e.col;
                stack.emplace_back(w, 0);
            }
        }
    }
    return std::nullopt;
}

std::string format_cycle(const std::vector<BipartiteVertex>& cycle) {
    std::string out;
    for (const auto& v : cycle) {
        if (!out.empty()) out += ' ';
        out += (v.side == BipartiteVertex::Side::Row ? 'u' : 'v');
        out += std::to_string(v.index + 1);
    }
    return out;
}

CycleEquivalence lemma_cycle_equivalence(const CommGraph& g) {
    CycleEquivalence r;
    r.g_has_cycle = !is_acyclic(g);
    auto bg = pencil_bipartite(g);
    r.bg_has_cycle = find_alternating_cycle(bg, diagonal_matching(g.size())).has_value();
    return r;
}

Polynomial char_poly_matchings(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error(ErrorCode::NonSquare, "characteristic polynomial of a non-square matrix");
    if (a.rows() > 12) throw Error(ErrorCode::TooLarge, "matching expansion limited to n <= 12");
    const int n = static_cast<int>(a.rows());
    auto bg = pencil_bipartite(a);

    // Accumulate ascending powers, reverse at the end.
    std::vector<double> ascending(static_cast<std::size_t>(n + 1), 0.0);
    std::vector<double> term;
    for_each_perfect_matching(bg, [&](const std::vector<int>& col_of_row) {
        term.assign(1, static_cast<double>(permutation_sign(col_of_row)));
        for (int r = 0; r < n; ++r) {
            int c = col_of_row[static_cast<std::size_t>(r)];
            if (r == c) {
                // multiply by (s - a_rr)
                term.push_back(0.0);
                for (std::size_t k = term.size() - 1; k > 0; --k) term[k] = term[k - 1] - a(r, r) * term[k];
                term[0] = -a(r, r) * term[0];
            } else {
                for (double& t : term) t *= -a(r, c);
            }
        }
        for (std::size_t k = 0; k < term.size(); ++k) ascending[k] += term[k];
        return true;
    });
    return Polynomial(ascending.rbegin(), ascending.rend());
}

}  // namespace leadform
