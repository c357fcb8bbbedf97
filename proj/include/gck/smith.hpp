#pragma once

#include <optional>
#include <vector>

#include "gck/int_matrix.hpp"

namespace gck {

// Smith decomposition of an integer matrix M: u * M * v == d, with u, v
// unimodular and d diagonal, every diagonal entry nonnegative, each one
// dividing the next, and all zeros at the end of the chain.
struct SmithDecomposition {
    IntMatrix u;  // rows(M) x rows(M)
    IntMatrix d;  // rows(M) x cols(M)
    IntMatrix v;  // cols(M) x cols(M)

    std::size_t rank() const;
    // The nonzero diagonal entries, in order.
    Vec invariant_factors() const;
};

SmithDecomposition smith(const IntMatrix& m);

bool is_unimodular(const IntMatrix& m);

// Exact inverse of a unimodular matrix; throws NotUnimodular otherwise.
IntMatrix inverse_unimodular(const IntMatrix& u);

// One integer solution x of M x = b, if any.
std::optional<Vec> solve(const IntMatrix& m, const Vec& b);

// Basis of { x : M x = 0 } as columns of the result (cols(M) x nullity).
// The columns extend to a basis of Z^cols(M), which later constructions
// rely on.
IntMatrix kernel_basis(const IntMatrix& m);

} // namespace gck
