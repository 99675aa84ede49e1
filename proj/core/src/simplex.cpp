#include "rccs/simplex.hpp"

#include "rccs/errors.hpp"

#include <cstddef>

namespace rccs {

bool equality_system_feasible(std::vector<std::vector<Rational>> rows, std::vector<Rational> rhs) {
    const std::size_t m = rows.size();
    if (m != rhs.size()) throw Error("simplex: row/rhs size mismatch");
    if (m == 0) return true;
    const std::size_t n = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != n) throw Error("simplex: ragged constraint matrix");

    // Make every right-hand side nonnegative, then add one artificial
    // variable per row and minimize their sum.
    for (std::size_t i = 0; i < m; ++i) {
        if (sgn(rhs[i]) < 0) {
            for (auto& a : rows[i]) a = -a;
            rhs[i] = -rhs[i];
        }
    }

    const std::size_t cols = n + m; // originals then artificials
    std::vector<std::vector<Rational>> tab(m, std::vector<Rational>(cols + 1, Rational(0)));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) tab[i][j] = rows[i][j];
        tab[i][n + i] = 1;
        tab[i][cols] = rhs[i];
    }
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

    // Reduced-cost row for min sum(artificials); artificial columns start
    // basic with zero reduced cost.
    std::vector<Rational> obj(cols + 1, Rational(0));
    for (std::size_t j = 0; j < n; ++j) {
        Rational colsum = 0;
        for (std::size_t i = 0; i < m; ++i) colsum += tab[i][j];
        obj[j] = -colsum;
    }
    Rational value = 0;
    for (std::size_t i = 0; i < m; ++i) value += rhs[i];
    obj[cols] = -value;

    while (true) {
        // Bland: smallest improving column.
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols; ++j) {
            if (sgn(obj[j]) < 0) {
                enter = j;
                break;
            }
        }
        if (enter == cols) break;

        // Ratio test; ties go to the smallest basis index.
        std::size_t leave = m;
        Rational best;
        for (std::size_t i = 0; i < m; ++i) {
            if (sgn(tab[i][enter]) <= 0) continue;
            Rational ratio = tab[i][cols] / tab[i][enter];
            if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m)
            break; // cannot happen for a phase-1 objective, but fail safe

        Rational pivot = tab[leave][enter];
        for (std::size_t j = 0; j <= cols; ++j) tab[leave][j] /= pivot;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || sgn(tab[i][enter]) == 0) continue;
            Rational factor = tab[i][enter];
            for (std::size_t j = 0; j <= cols; ++j) tab[i][j] -= factor * tab[leave][j];
        }
        if (sgn(obj[enter]) != 0) {
            Rational factor = obj[enter];
            for (std::size_t j = 0; j <= cols; ++j) obj[j] -= factor * tab[leave][j];
        }
        basis[leave] = enter;
    }

    return sgn(obj[cols]) == 0; // optimum of sum(artificials) is zero
}

} // namespace rccs
