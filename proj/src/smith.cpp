#include "gck/smith.hpp"

namespace gck {

std::size_t SmithDecomposition::rank() const {
    std::size_t r = 0;
    std::size_t n = std::min(d.rows(), d.cols());
    for (std::size_t i = 0; i < n; ++i)
        if (d.at(i, i) != 0) ++r;
    return r;
}

Vec SmithDecomposition::invariant_factors() const {
    Vec f;
    std::size_t n = std::min(d.rows(), d.cols());
    for (std::size_t i = 0; i < n; ++i)
        if (d.at(i, i) != 0) f.push_back(d.at(i, i));
    return f;
}

namespace {

Int abs_int(const Int& x) { return x < 0 ? Int(-x) : x; }

} // namespace

SmithDecomposition smith(const IntMatrix& m) {
    std::size_t nr = m.rows(), nc = m.cols();
    SmithDecomposition s{IntMatrix::identity(nr), m, IntMatrix::identity(nc)};
    IntMatrix& d = s.d;
    IntMatrix& u = s.u;
    IntMatrix& v = s.v;

    std::size_t n = std::min(nr, nc);
    for (std::size_t t = 0; t < n; ++t) {
        for (;;) {
            // smallest nonzero entry of the trailing block becomes the pivot
            std::size_t pi = t, pj = t;
            bool found = false;
            for (std::size_t i = t; i < nr; ++i)
                for (std::size_t j = t; j < nc; ++j)
                    if (d.at(i, j) != 0 &&
                        (!found || abs_int(d.at(i, j)) < abs_int(d.at(pi, pj)))) {
                        pi = i;
                        pj = j;
                        found = true;
                    }
            if (!found) {
                // trailing block is zero; decomposition is finished
                return s;
            }
            if (pi != t) { d.swap_rows(t, pi); u.swap_rows(t, pi); }
            if (pj != t) { d.swap_cols(t, pj); v.swap_cols(t, pj); }

            const Int p = d.at(t, t);
            bool residue = false;
            for (std::size_t i = t + 1; i < nr; ++i) {
                if (d.at(i, t) == 0) continue;
                Int q = d.at(i, t) / p;  // truncated; remainder strictly smaller than |p|
                d.add_row(i, t, -q);
                u.add_row(i, t, -q);
                if (d.at(i, t) != 0) residue = true;
            }
            for (std::size_t j = t + 1; j < nc; ++j) {
                if (d.at(t, j) == 0) continue;
                Int q = d.at(t, j) / p;
                d.add_col(j, t, -q);
                v.add_col(j, t, -q);
                if (d.at(t, j) != 0) residue = true;
            }
            if (residue) continue;  // a smaller entry appeared; re-pick the pivot

            // pivot now alone in its row and column; enforce divisibility
            bool fixed = false;
            for (std::size_t i = t + 1; i < nr && !fixed; ++i)
                for (std::size_t j = t + 1; j < nc && !fixed; ++j)
                    if (d.at(i, j) % p != 0) {
                        // pulling row i up makes the offending entry reachable
                        // from the pivot position, shrinking the pivot next pass
                        d.add_row(t, i, 1);
                        u.add_row(t, i, 1);
                        fixed = true;
                    }
            if (fixed) continue;

            if (d.at(t, t) < 0) { d.negate_row(t); u.negate_row(t); }
            break;
        }
    }
    return s;
}

bool is_unimodular(const IntMatrix& m) {
    if (m.rows() != m.cols()) return false;
    Int dd = m.det();
    return dd == 1 || dd == -1;
}

IntMatrix inverse_unimodular(const IntMatrix& u) {
    if (u.rows() != u.cols()) throw NotUnimodular("not square");
    SmithDecomposition s = smith(u);
    if (!s.d.is_identity()) throw NotUnimodular("determinant not a unit");
    // p * u * q = 1  =>  inverse = q * p
    return s.v * s.u;
}

std::optional<Vec> solve(const IntMatrix& m, const Vec& b) {
    if (b.size() != m.rows()) throw NonConformable("solve");
    SmithDecomposition s = smith(m);
    Vec c = s.u.apply(b);
    std::size_t n = std::min(m.rows(), m.cols());
    Vec y(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const Int d = i < n ? s.d.at(i, i) : Int(0);
        if (d == 0) {
            if (c[i] != 0) return std::nullopt;
        } else {
            if (c[i] % d != 0) return std::nullopt;
            y[i] = c[i] / d;
        }
    }
    return s.v.apply(y);
}

IntMatrix kernel_basis(const IntMatrix& m) {
    SmithDecomposition s = smith(m);
    std::vector<std::size_t> free_cols;
    std::size_t n = std::min(m.rows(), m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (j >= n || s.d.at(j, j) == 0) free_cols.push_back(j);
    std::vector<std::size_t> all_rows(m.cols());
    for (std::size_t i = 0; i < m.cols(); ++i) all_rows[i] = i;
    return s.v.select(all_rows, free_cols);
}

} // namespace gck
